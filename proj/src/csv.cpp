#include "dsgda/csv.hpp"

#include <charconv>
#include <cmath>

namespace dsgda {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os_ << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n\r") == std::string::npos) {
      os_ << f;
    } else {
      os_ << '"';
      for (char c : f) {
        if (c == '"') os_ << '"';
        os_ << c;
      }
      os_ << '"';
    }
  }
  os_ << '\n';
}

std::vector<std::string> trace_csv_header(bool with_clients) {
  std::vector<std::string> h{"method", "K", "R_index", "gamma", "seed", "dist_sq", "grad_norm", "comm_rounds",
                             "oracle_calls"};
  if (with_clients) h.push_back("clients");
  return h;
}

void write_trace_csv(std::ostream& os, const RunTrace& trace, bool with_header) {
  CsvWriter w(os);
  const bool clients = trace.clients > 0;
  if (with_header) w.row(trace_csv_header(clients));
  for (const auto& r : trace.rounds) {
    std::vector<std::string> f{trace.method,
                               std::to_string(trace.K),
                               std::to_string(r.round),
                               format_double(trace.gamma),
                               std::to_string(trace.seed),
                               r.dist_sq ? format_double(*r.dist_sq) : std::string(),
                               format_double(r.grad_norm),
                               std::to_string(r.comm_rounds),
                               std::to_string(r.oracle_calls)};
    if (clients) f.push_back(std::to_string(trace.clients));
    w.row(f);
  }
}

}  // namespace dsgda
