#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "cbm/commands.hpp"
#include "cbm/errors.hpp"
#include "cbm/io.hpp"

namespace {

// Flag values land here first; they are overlaid onto the resolved config
// after the config file (CLI wins over file wins over defaults).
struct CliValues {
  std::string config;
  cbm::RunConfig v;
};

void add_common_options(CLI::App* cmd, CliValues& c) {
  cmd->add_option("--config", c.config, "JSON config file (resolved defaults overlay)");
  cmd->add_option("--seed", c.v.seed, "master seed for every derived RNG stream");
  cmd->add_option("--backend", c.v.backend, "sampler backend")
      ->check(CLI::IsMember({"gibbs", "exact"}));
  cmd->add_option("--kernel", c.v.kernel, "sweep kernel")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  cmd->add_option("--out", c.v.out, "output directory");
  cmd->add_option("--variant", c.v.variant, "experiment size (images per set)")
      ->check(CLI::IsMember({50, 100, 200}));
  cmd->add_option("--passes", c.v.passes, "training passes");
}

void overlay_cli(const CLI::App* cmd, const CliValues& c, cbm::RunConfig& rc) {
  auto took = [&](const char* name) { return cmd->count(name) > 0; };
  if (took("--seed")) rc.seed = c.v.seed;
  if (took("--backend")) rc.backend = c.v.backend;
  if (took("--kernel")) rc.kernel = c.v.kernel;
  if (took("--out")) rc.out = c.v.out;
  if (took("--variant")) rc.variant = c.v.variant;
  if (took("--passes")) rc.passes = c.v.passes;
  if (cmd->get_option_no_throw("--reads") && took("--reads")) rc.reads = c.v.reads;
  if (cmd->get_option_no_throw("--num-reads") && took("--num-reads"))
    rc.num_reads = c.v.num_reads;
  if (cmd->get_option_no_throw("--checkpoint") && took("--checkpoint"))
    rc.checkpoint = c.v.checkpoint;
  if (cmd->get_option_no_throw("--set") && took("--set")) rc.set = c.v.set;
  if (cmd->get_option_no_throw("--problem") && took("--problem"))
    rc.problem = c.v.problem;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chimera-topology Boltzmann machine emulator"};
  app.require_subcommand(1);
  CliValues c;

  CLI::App* cq = app.add_subcommand("characterize-qubits",
                                    "decoupled-qubit response sweep -> qubits.csv");
  add_common_options(cq, c);
  cq->add_option("--reads", c.v.reads, "reads per sweep step");

  CLI::App* cc = app.add_subcommand("characterize-coupling",
                                    "pair-coupling sweep -> coupling.csv");
  add_common_options(cc, c);
  cc->add_option("--reads", c.v.reads, "reads per sweep step");

  CLI::App* tr = app.add_subcommand("train",
                                    "train the digit network -> checkpoint + reports");
  add_common_options(tr, c);

  CLI::App* te = app.add_subcommand("test", "score a checkpoint -> report.csv");
  add_common_options(te, c);
  te->add_option("--checkpoint", c.v.checkpoint, "checkpoint file to score");
  te->add_option("--set", c.v.set, "which split half to score")
      ->check(CLI::IsMember({"train", "test"}));

  CLI::App* sa = app.add_subcommand("sample", "sample a problem file -> samples.csv");
  add_common_options(sa, c);
  sa->add_option("--problem", c.v.problem, "problem text file");
  sa->add_option("--num-reads", c.v.num_reads, "reads to draw");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad arguments are configuration errors
  }

  CLI::App* cmd = app.get_subcommands().front();
  cbm::RunConfig rc;
  rc.command = cmd->get_name();

  try {
    if (!c.config.empty()) cbm::apply_config_json(rc, cbm::read_file(c.config));
    overlay_cli(cmd, c, rc);

    std::vector<std::string> written;
    if (rc.command == "characterize-qubits") written = cbm::cmd_characterize_qubits(rc);
    else if (rc.command == "characterize-coupling") written = cbm::cmd_characterize_coupling(rc);
    else if (rc.command == "train") written = cbm::cmd_train(rc);
    else if (rc.command == "test") written = cbm::cmd_test(rc);
    else written = cbm::cmd_sample(rc);

    for (const std::string& p : written) std::cout << "wrote " << p << "\n";
    return 0;
  } catch (const cbm::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 4;
  } catch (const cbm::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const cbm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
