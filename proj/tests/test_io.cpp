#include <gtest/gtest.h>

#include <sstream>

#include "frgs/io.hpp"
#include "frgs/random_fields.hpp"

using namespace frgs;

namespace {

const char* valid_config = R"({"N": 2, "s": 0.5, "p": 2.5, "q": 4, "L": 16, "n": 32, "max_iters": 10,
  "tol_residual": 1e-3, "tol_nehari": 1e-10, "step0": 0.5, "backtrack": 0.5, "seed": 1, "init_width": 1.5})";

} // namespace

TEST(FieldCsv, RoundTripIsExact)
{
  for (int dim : {2, 3}) {
    const Grid g(dim, 7.3, 8);
    Rng rng(40);
    const GridField u = random_mixed_field(g, rng);
    std::stringstream ss;
    write_field_csv(ss, u);
    const GridField back = read_field_csv(ss);
    EXPECT_TRUE(back.grid() == g);
    EXPECT_TRUE(std::equal(u.values().begin(), u.values().end(), back.values().begin()));
  }
}

TEST(FieldCsv, HeaderAndDigits)
{
  const Grid g(2, 1.0, 2);
  std::stringstream ss;
  write_field_csv(ss, GridField(g, {0.1, 0.0, 0.0, 1.0 / 3.0}));
  std::string header, first;
  std::getline(ss, header);
  std::getline(ss, first);
  EXPECT_EQ(header, "index,x1,x2,value");
  EXPECT_EQ(first, "0,0,0,0.10000000000000001");
}

TEST(FieldCsv, ErrorsCarryLineNumbers)
{
  std::stringstream bad("index,x1,x2,value\n0,0,0,1\n1,0,0.5,abc\n");
  try {
    read_field_csv(bad);
    FAIL() << "expected parse_error";
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::stringstream cols("index,x1,x2,value\n0,0,0\n");
  EXPECT_THROW(read_field_csv(cols), parse_error);
  std::stringstream header("idx,x1,x2,value\n");
  EXPECT_THROW(read_field_csv(header), parse_error);
  std::stringstream count("index,x1,x2,value\n0,0,0,1\n1,0,0.5,1\n2,0.5,0,1\n");
  EXPECT_THROW(read_field_csv(count), parse_error);
}

TEST(Config, ParsesAndEchoes)
{
  const SolverConfig c = parse_config(std::string(valid_config));
  EXPECT_EQ(c.grid.points_per_dim(), 32u);
  EXPECT_EQ(c.exps.q, 4.0);
  EXPECT_EQ(c.seed, 1u);
  const SolverConfig again = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(Config, MissingAndUnknownKeys)
{
  auto j = nlohmann::json::parse(valid_config);
  j.erase("s");
  try {
    parse_config(j);
    FAIL() << "expected parse_error";
  } catch (const parse_error& e) {
    EXPECT_NE(std::string(e.what()).find("'s'"), std::string::npos);
  }
  j = nlohmann::json::parse(valid_config);
  j["tol_resdual"] = 1e-3;
  EXPECT_THROW(parse_config(j), parse_error);
  j = nlohmann::json::parse(valid_config);
  j["n"] = 32.5;
  EXPECT_THROW(parse_config(j), parse_error);
  EXPECT_THROW(parse_config(std::string("{not json")), parse_error);
  j = nlohmann::json::parse(valid_config);
  j["p"] = 5.0;
  EXPECT_THROW(parse_config(j), domain_error);
}

TEST(ProfileCsv, Format)
{
  const Grid g(2, 3.0, 3);
  std::stringstream ss;
  write_profile_csv(ss, GridField(g, {0, 1, 0, 2, 5, 3, 0, 4, 0}));
  EXPECT_EQ(ss.str(), "r,u\n0,5\n1,2.5\n1.4142135623730951,0\n");
}

TEST(Json, ReportKeys)
{
  const auto j = hypothesis_to_json(check_hypotheses(make_nonlinearity(Exponents::make(2, 0.5, 2.5, 4)), 1e-3, 1e3, 1000));
  for (const char* k : {"mu_hat", "ratio2_min", "c0_hat", "c1_hat", "c2_hat", "c3_hat", "sample_count"})
    EXPECT_TRUE(j.contains(k)) << k;
  const auto o = orlicz_to_json(OrliczReport{});
  for (const char* k : {"gamma_measure", "r", "luxemburg", "inf_decomp", "lower_bound", "upper_bound",
                        "q_norm_outside", "p_norm_inside"})
    EXPECT_TRUE(o.contains(k)) << k;
}
