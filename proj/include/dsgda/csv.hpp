#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "dsgda/solver.hpp"

namespace dsgda {

/// Shortest decimal text that parses back to the same double ("nan", "inf", "-inf" for specials).
std::string format_double(double x);

/// Minimal RFC 4180 writer: fields containing separators or quotes are quoted.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& os_;
};

/// method,K,R_index,gamma,seed,dist_sq,grad_norm,comm_rounds,oracle_calls[,clients]
void write_trace_csv(std::ostream& os, const RunTrace& trace, bool with_header = true);
std::vector<std::string> trace_csv_header(bool with_clients);

}  // namespace dsgda
