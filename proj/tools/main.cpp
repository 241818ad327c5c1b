#include <iostream>

#include <CLI11.hpp>

#include "lipselect/cli.hpp"

namespace {

void add_common(CLI::App* sub, lipselect::cli::RunConfig& rc) {
  sub->add_option("--config", rc.config, "JSON document supplying any option below");
  sub->add_option("--out", rc.out, "report path (JSON); CSV tables are written beside it");
}

}  // namespace

int main(int argc, char** argv) {
  using lipselect::cli::RunConfig;
  CLI::App app{"Lipschitz selections on sampled metric spaces"};
  app.require_subcommand(1);
  RunConfig rc;

  auto* separate = app.add_subcommand("separate", "maximal separated sets and the hierarchy B_n");
  add_common(separate, rc);
  separate->add_option("--space", rc.space);
  separate->add_option("--r", rc.r, "single radius; omit for the dyadic hierarchy");
  separate->add_option("--rounds", rc.rounds);

  auto* select = app.add_subcommand("select", "run the selection iteration and verify every round");
  add_common(select, rc);
  select->add_option("--correspondence", rc.correspondence);
  select->add_option("--f0", rc.f0, "initial selection table (JSON)");
  select->add_option("--alpha", rc.alpha);
  select->add_option("--beta", rc.beta);
  select->add_option("--epsilon", rc.epsilon);
  select->add_option("--rounds", rc.rounds);
  select->add_option("--delta-min", rc.delta_min);
  select->add_option("--tol", rc.tol);

  auto* plip = app.add_subcommand("plip", "pointwise Lipschitz profiles of a table");
  add_common(plip, rc);
  plip->add_option("--space", rc.space);
  plip->add_option("--values", rc.values);
  plip->add_option("--radii", rc.radii);
  plip->add_option("--points", rc.points);
  plip->add_option("--k", rc.k);
  plip->add_option("--alpha", rc.alpha, "fail if any estimate exceeds alpha + tol");
  plip->add_option("--tol", rc.tol);

  auto* bg = app.add_subcommand("bartle-graves", "homogeneous right inverse of a linear surjection");
  add_common(bg, rc);
  bg->add_option("--matrix", rc.matrix);
  bg->add_option("--beta", rc.beta);
  bg->add_option("--sphere-count", rc.sphere_count);
  bg->add_option("--seed", rc.seed);
  bg->add_option("--rounds", rc.rounds);
  bg->add_option("--epsilon", rc.epsilon);
  bg->add_option("--delta-min", rc.delta_min);
  bg->add_option("--tol", rc.tol);

  auto* verify = app.add_subcommand("verify", "re-check a stored selection sequence");
  add_common(verify, rc);
  verify->add_option("--correspondence", rc.correspondence);
  verify->add_option("--sequence", rc.sequence);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lipselect::cli::kSchemaError;
  }
  rc.command = app.get_subcommands().front()->get_name();
  return lipselect::cli::run(rc, std::cout, std::cerr);
}
