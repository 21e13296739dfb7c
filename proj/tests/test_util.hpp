#pragma once

#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dsgda/game.hpp"
#include "dsgda/io.hpp"
#include "dsgda/point.hpp"
#include "dsgda/random_games.hpp"

namespace dsgda::test {

inline const nlohmann::json& oracle() {
  static const nlohmann::json data = [] {
    std::ifstream in(DSGDA_ORACLE_FILE);
    if (!in) throw std::runtime_error("missing oracle file " + std::string(DSGDA_ORACLE_FILE));
    return nlohmann::json::parse(in);
  }();
  return data;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  EXPECT_EQ(a.size(), b.size());
  return (a - b).cwiseAbs().maxCoeff();
}

inline JointPoint scalar_point(double u, double v) { return JointPoint::two_player(u, v); }

}  // namespace dsgda::test
