#include <gtest/gtest.h>

#include "eprop/config.hpp"
#include "eprop/error.hpp"

using namespace eprop;

TEST(Config, ParsesSectionsAsDottedKeys) {
  const auto c = Config::from_string(
      "seed = 4\n"
      "[network]\n"
      "n_rec = 50 ; trailing comment\n"
      "[opt]\n"
      "eta = 1e-4\n"
      "kind = adam\n");
  EXPECT_EQ(c.get_int("seed", 0), 4);
  EXPECT_EQ(c.get_int("network.n_rec", 0), 50);
  EXPECT_DOUBLE_EQ(c.get_double("opt.eta", 0.0), 1e-4);
  EXPECT_EQ(c.get_string("opt.kind", ""), "adam");
  EXPECT_EQ(c.get_int("missing", 7), 7);
}

TEST(Config, TypedAccessorsRejectGarbage) {
  Config c;
  c.set("a", "12x");
  c.set("b", "maybe");
  c.set("l", "1,x");
  EXPECT_THROW(c.get_int("a", 0), ConfigError);
  EXPECT_THROW(c.get_double("a", 0.0), ConfigError);
  EXPECT_THROW(c.get_bool("b", false), ConfigError);
  EXPECT_THROW(c.get_int_list("l", {}), ConfigError);
}

TEST(Config, BoolsAndLists) {
  Config c;
  c.set("t", "on");
  c.set("f", "0");
  c.set("l", "0,1,7");
  EXPECT_TRUE(c.get_bool("t", false));
  EXPECT_FALSE(c.get_bool("f", true));
  EXPECT_EQ(c.get_int_list("l", {}), (std::vector<std::int64_t>{0, 1, 7}));
}

TEST(Config, MergeOverridesAndRoundTrips) {
  Config a, b;
  a.set("x", "1");
  a.set("y", "2");
  b.set("y", "3");
  a.merge(b);
  EXPECT_EQ(a.get_string("y", ""), "3");
  const auto back = Config::from_string(a.to_string());
  EXPECT_EQ(back.items(), a.items());
}

TEST(Config, MissingFile) {
  EXPECT_THROW(Config::from_file("/nonexistent/x.cfg"), ConfigError);
}
