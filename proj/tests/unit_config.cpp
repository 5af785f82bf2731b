#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "ersi/config.hpp"

using namespace ersi;

TEST_CASE("presets validate and echo deterministically") {
  RunConfig desk;
  desk.apply_preset("desk");
  desk.validate();
  CHECK(desk.kappa == 8.0);
  CHECK(desk.h == 0.05);
  CHECK(desk.n_obs == 1024);
  CHECK(desk.n_samples == 2000);
  CHECK(desk.beta == 0.875);

  RunConfig paper;
  paper.apply_preset("paper");
  paper.validate();
  CHECK(paper.kappa == 16.0);
  CHECK(paper.n_samples == 20000);

  CHECK(desk.echo() == desk.echo());
  CHECK_THROWS_AS(desk.apply_preset("laptop"), ValidationError);
}

TEST_CASE("config file round trip") {
  RunConfig cfg;
  cfg.apply_preset("desk");
  cfg.set("recon.beta", "1.125");
  cfg.set("sampling.seed", "99");

  const std::string path = "config_roundtrip_test.cfg";
  {
    std::ofstream out(path);
    out << cfg.echo();
  }
  const RunConfig back = load_config_file(path);
  CHECK(back.echo() == cfg.echo());
  std::remove(path.c_str());
}

TEST_CASE("config parsing errors") {
  RunConfig cfg;
  CHECK_THROWS_AS(cfg.set("material.colour", "blue"), ValidationError);
  CHECK_THROWS_AS(cfg.set("material.kappa", "fast"), ValidationError);
  CHECK_THROWS_AS(cfg.set("sampling.n_samples", "-5"), ValidationError);
  CHECK_THROWS_AS((void)load_config_file("no_such_config_file.cfg"), IoError);
}

TEST_CASE("validation catches bad values") {
  auto expect_invalid = [](auto&& mutate) {
    RunConfig cfg;
    cfg.apply_preset("desk");
    mutate(cfg);
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
  };
  expect_invalid([](RunConfig& c) { c.n_samples = 0; });
  expect_invalid([](RunConfig& c) { c.mu = -1.0; });
  expect_invalid([](RunConfig& c) { c.lambda = -10.0; });
  expect_invalid([](RunConfig& c) { c.beta = 2.5; });
  expect_invalid([](RunConfig& c) { c.beta = 0.0; });
  expect_invalid([](RunConfig& c) { c.noise_level = -0.01; });
  expect_invalid([](RunConfig& c) { c.profile = "unknown"; });
  expect_invalid([](RunConfig& c) { c.noise_mode = "psychedelic"; });
  expect_invalid([](RunConfig& c) { c.h = 0.0; });
  expect_invalid([](RunConfig& c) { c.support_hi = c.support_lo; });
}

TEST_CASE("suggested beta range flag") {
  RunConfig cfg;
  cfg.apply_preset("desk");
  CHECK(cfg.beta_in_suggested_range());
  cfg.beta = 0.5;
  CHECK_FALSE(cfg.beta_in_suggested_range());
  cfg.beta = 1.3;
  CHECK_FALSE(cfg.beta_in_suggested_range());
}
