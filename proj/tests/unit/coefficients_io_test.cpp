#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "bermudan/coefficients_io.hpp"
#include "bermudan/error.hpp"

namespace {

using namespace bermudan;

DualCoefficients sample() {
  DualCoefficients c;
  c.basis_hash = 0xfedcba9876543210ULL;
  c.train_paths = 1000;
  c.seed = 20240901;
  c.stream_id = 5;
  c.ridge = 1e-8;
  c.dates.push_back({{0.1, -2.5e-17, 1.0 / 3.0}, {12.0}, 4.5, 3});
  c.dates.push_back({{std::nextafter(1.0, 2.0), -0.0}, {1.0, 2.0, 3.0e300}, 0.0, 2});
  return c;
}

TEST(CoefficientsIo, RoundTripIsExact) {
  const DualCoefficients c = sample();
  std::stringstream buffer;
  write_coefficients(buffer, c, "payoff=basket_put;rate=0.05");
  const DualCoefficients back = read_coefficients(buffer);
  EXPECT_EQ(back.basis_hash, c.basis_hash);
  EXPECT_EQ(back.train_paths, c.train_paths);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.stream_id, c.stream_id);
  EXPECT_EQ(back.ridge, c.ridge);
  ASSERT_EQ(back.dates.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.dates[i].beta, c.dates[i].beta);
    EXPECT_EQ(back.dates[i].gamma, c.dates[i].gamma);
    EXPECT_EQ(back.dates[i].rss, c.dates[i].rss);
    EXPECT_EQ(back.dates[i].rank, c.dates[i].rank);
  }
}

std::string error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    read_coefficients(in, "c.json");
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

TEST(CoefficientsIo, RejectsMalformedDocuments) {
  std::stringstream buffer;
  write_coefficients(buffer, sample(), "x");
  std::string good = buffer.str();

  EXPECT_NE(error_of("{"), "");
  EXPECT_NE(error_of("{\"format\": \"other\", \"version\": 1}").find("not a coefficient file"), std::string::npos);

  std::string versioned = good;
  versioned.replace(versioned.find("\"version\": 1"), 12, "\"version\": 9");
  EXPECT_NE(error_of(versioned).find("unsupported coefficient format version 9"), std::string::npos);

  std::string missing = good;
  missing.replace(missing.find("\"gamma\""), 7, "\"gamme\"");
  EXPECT_NE(error_of(missing).find("c.json"), std::string::npos);
}

TEST(CoefficientsIo, MissingFile) {
  EXPECT_THROW(read_coefficients_file("/nonexistent/coeffs.json"), ValidationError);
}

}  // namespace
