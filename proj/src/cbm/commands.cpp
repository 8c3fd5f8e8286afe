#include "cbm/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>

#include "json.hpp"

#include "cbm/characterize.hpp"
#include "cbm/errors.hpp"
#include "cbm/exact.hpp"
#include "cbm/io.hpp"
#include "cbm/kernels.hpp"
#include "cbm/mnist.hpp"
#include "cbm/network.hpp"
#include "cbm/rng.hpp"

namespace cbm {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string run_config_to_json(const RunConfig& rc) {
  ordered_json j;
  j["command"] = rc.command;
  j["out"] = rc.out;
  j["rows"] = rc.rows;
  j["cols"] = rc.cols;
  j["inactive"] = rc.inactive;
  j["backend"] = rc.backend;
  j["kernel"] = rc.kernel;
  j["beta"] = rc.beta;
  j["sweeps_per_read"] = rc.sweeps_per_read;
  j["burn_in_sweeps"] = rc.burn_in_sweeps;
  j["noise_std"] = rc.noise_std;
  j["noise_seed"] = rc.noise_seed;
  j["random_scan"] = rc.random_scan;
  j["seed"] = rc.seed;
  j["qubit_step"] = rc.qubit_step;
  j["coupling_step"] = rc.coupling_step;
  j["reads"] = rc.reads;
  j["images"] = rc.images;
  j["labels"] = rc.labels;
  j["variant"] = rc.variant;
  j["split_seed"] = rc.split_seed;
  j["tile_rows"] = rc.tile_rows;
  j["tile_cols"] = rc.tile_cols;
  j["learning_rate"] = rc.learning_rate;
  j["phase12_iterations"] = rc.phase12_iterations;
  j["reads_per_sample"] = rc.reads_per_sample;
  j["passes"] = rc.passes;
  j["clamp_visible"] = rc.clamp_visible;
  j["weight_init_range"] = rc.weight_init_range;
  j["bias_normalization"] = rc.bias_normalization;
  j["train_intra_couplers"] = rc.train_intra_couplers;
  j["shuffle_each_pass"] = rc.shuffle_each_pass;
  j["report_interval"] = rc.report_interval;
  j["checkpoint"] = rc.checkpoint;
  j["set"] = rc.set;
  j["problem"] = rc.problem;
  j["num_reads"] = rc.num_reads;
  return j.dump(2) + "\n";
}

void apply_config_json(RunConfig& rc, const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    throw ValueError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ValueError("config: expected a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const auto& v = it.value();
      if (k == "command") {
        const std::string c = v.get<std::string>();
        if (!rc.command.empty() && c != rc.command)
          throw ValueError("config: command '" + c + "' does not match invoked command '" +
                           rc.command + "'");
      } else if (k == "out") rc.out = v.get<std::string>();
      else if (k == "rows") rc.rows = v.get<int>();
      else if (k == "cols") rc.cols = v.get<int>();
      else if (k == "inactive") rc.inactive = v.get<std::vector<int>>();
      else if (k == "backend") rc.backend = v.get<std::string>();
      else if (k == "kernel") rc.kernel = v.get<std::string>();
      else if (k == "beta") rc.beta = v.get<double>();
      else if (k == "sweeps_per_read") rc.sweeps_per_read = v.get<int>();
      else if (k == "burn_in_sweeps") rc.burn_in_sweeps = v.get<int>();
      else if (k == "noise_std") rc.noise_std = v.get<double>();
      else if (k == "noise_seed") rc.noise_seed = v.get<uint64_t>();
      else if (k == "random_scan") rc.random_scan = v.get<bool>();
      else if (k == "seed") rc.seed = v.get<uint64_t>();
      else if (k == "qubit_step") rc.qubit_step = v.get<double>();
      else if (k == "coupling_step") rc.coupling_step = v.get<double>();
      else if (k == "reads") rc.reads = v.get<int>();
      else if (k == "images") rc.images = v.get<std::string>();
      else if (k == "labels") rc.labels = v.get<std::string>();
      else if (k == "variant") rc.variant = v.get<int>();
      else if (k == "split_seed") rc.split_seed = v.get<uint64_t>();
      else if (k == "tile_rows") rc.tile_rows = v.get<int>();
      else if (k == "tile_cols") rc.tile_cols = v.get<int>();
      else if (k == "learning_rate") rc.learning_rate = v.get<double>();
      else if (k == "phase12_iterations") rc.phase12_iterations = v.get<int>();
      else if (k == "reads_per_sample") rc.reads_per_sample = v.get<int>();
      else if (k == "passes") rc.passes = v.get<int>();
      else if (k == "clamp_visible") rc.clamp_visible = v.get<bool>();
      else if (k == "weight_init_range") rc.weight_init_range = v.get<double>();
      else if (k == "bias_normalization") rc.bias_normalization = v.get<std::string>();
      else if (k == "train_intra_couplers") rc.train_intra_couplers = v.get<bool>();
      else if (k == "shuffle_each_pass") rc.shuffle_each_pass = v.get<bool>();
      else if (k == "report_interval") rc.report_interval = v.get<int>();
      else if (k == "checkpoint") rc.checkpoint = v.get<std::string>();
      else if (k == "set") rc.set = v.get<std::string>();
      else if (k == "problem") rc.problem = v.get<std::string>();
      else if (k == "num_reads") rc.num_reads = v.get<int>();
      else throw ValueError("config: unknown key '" + k + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValueError(std::string("config: ") + e.what());
  }
}

namespace {

std::shared_ptr<const Topology> make_topology(const RunConfig& rc) {
  return std::make_shared<Topology>(Topology::build(rc.rows, rc.cols, rc.inactive));
}

SamplerConfig sampler_config(const RunConfig& rc) {
  SamplerConfig scfg;
  scfg.beta = rc.beta;
  scfg.sweeps_per_read = rc.sweeps_per_read;
  scfg.burn_in_sweeps = rc.burn_in_sweeps;
  scfg.seed = rc.seed;
  scfg.noise_std = rc.noise_std;
  scfg.noise_seed = rc.noise_seed;
  scfg.random_scan = rc.random_scan;
  scfg.validate();
  return scfg;
}

TrainConfig train_config(const RunConfig& rc) {
  TrainConfig tc;
  tc.learning_rate = rc.learning_rate;
  tc.phase12_iterations = rc.phase12_iterations;
  tc.reads_per_sample = rc.reads_per_sample;
  tc.passes = rc.passes;
  tc.clamp_visible = rc.clamp_visible;
  tc.weight_init_range = rc.weight_init_range;
  tc.seed = rc.seed;
  tc.bias_normalization = bias_norm_from_name(rc.bias_normalization);
  tc.train_intra_couplers = rc.train_intra_couplers;
  tc.shuffle_each_pass = rc.shuffle_each_pass;
  tc.report_interval = rc.report_interval;
  tc.validate();
  return tc;
}

std::string write_config(const RunConfig& rc) {
  const fs::path p = fs::path(rc.out) / "config.json";
  atomic_write(p, run_config_to_json(rc));
  return p.string();
}

Tiling resolve_tiling(const RunConfig& rc) {
  Tiling t;
  if (rc.tile_rows > 0 && rc.tile_cols > 0) {
    t.rows = rc.tile_rows;
    t.cols = rc.tile_cols;
  } else if (rc.tile_rows == 0 && rc.tile_cols == 0) {
    t.rows = 1;
    t.cols = rc.variant == 200 ? 2 : 1;  // the 200-image run doubles the hidden layer
  } else {
    throw ValueError("tile_rows/tile_cols must both be positive or both 0 (auto)");
  }
  return t;
}

std::vector<double> collect_weights(const Network& net) {
  std::vector<double> v;
  for (const WeightGroup& g : net.groups()) v.insert(v.end(), g.w.begin(), g.w.end());
  for (const HiddenInfo& hi : net.hidden_infos()) {
    v.insert(v.end(), hi.intra_w.begin(), hi.intra_w.end());
    v.insert(v.end(), hi.virtual_w.begin(), hi.virtual_w.end());
  }
  return v;
}

double mean_abs_delta(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return a.empty() ? 0.0 : s / double(a.size());
}

std::string score_triplet(const Scores& s) {
  return format_double(s.top1) + "/" + format_double(s.top2) + "/" + format_double(s.top3);
}

}  // namespace

std::vector<std::string> cmd_characterize_qubits(const RunConfig& rc) {
  auto topo = make_topology(rc);
  const SamplerConfig scfg = sampler_config(rc);
  if (rc.reads < 1) throw ValueError("reads must be >= 1");
  kern::force_sweep_kernel(rc.kernel.c_str());

  const QubitSweepResult res = characterize_qubits(topo, backend_from_name(rc.backend),
                                                   scfg, rc.qubit_step, rc.reads);

  std::string csv = "coefficient,mean_p1,std_p1\n";
  for (const QubitSweepRow& r : res.rows)
    csv += format_double(r.coefficient) + "," + format_double(r.mean_p1) + "," +
           format_double(r.std_p1) + "\n";
  const fs::path csv_path = fs::path(rc.out) / "qubits.csv";
  atomic_write(csv_path, csv);

  ordered_json sj;
  sj["steps"] = res.rows.size();
  sj["fitted_steepness"] = res.fitted_steepness;
  sj["max_abs_dev"] = res.max_abs_dev;
  const fs::path sum_path = fs::path(rc.out) / "summary.json";
  atomic_write(sum_path, sj.dump(2) + "\n");

  std::cout << "qubit response sweep: " << res.rows.size() << " steps ("
            << backend_name(backend_from_name(rc.backend)) << ")\n"
            << "fitted steepness k = " << format_double(res.fitted_steepness)
            << ", max |measured - model| = " << format_double(res.max_abs_dev) << "\n";
  return {write_config(rc), csv_path.string(), sum_path.string()};
}

std::vector<std::string> cmd_characterize_coupling(const RunConfig& rc) {
  auto topo = make_topology(rc);
  const SamplerConfig scfg = sampler_config(rc);
  if (rc.reads < 1) throw ValueError("reads must be >= 1");
  kern::force_sweep_kernel(rc.kernel.c_str());

  const CouplingSweepResult res = characterize_coupling(
      topo, backend_from_name(rc.backend), scfg, rc.coupling_step, rc.reads);

  std::string csv = "c,p11,p10,p01,p00,metric,saturated\n";
  double num = 0, den = 0;  // least-squares slope of metric vs c through 0
  for (const CouplingSweepRow& r : res.rows) {
    csv += format_double(r.c) + "," + format_double(r.p11) + "," + format_double(r.p10) +
           "," + format_double(r.p01) + "," + format_double(r.p00) + ",";
    csv += r.saturated ? "" : format_double(r.metric);
    csv += r.saturated ? ",1\n" : ",0\n";
    if (!r.saturated && r.c != 0) {
      num += r.c * r.metric;
      den += r.c * r.c;
    }
  }
  const fs::path csv_path = fs::path(rc.out) / "coupling.csv";
  atomic_write(csv_path, csv);

  std::cout << "coupling sweep over " << res.pairs.size() << " disjoint pairs ("
            << backend_name(backend_from_name(rc.backend)) << ")\n";
  if (den > 0)
    std::cout << "metric slope vs c = " << format_double(num / den)
              << " (model: -beta * c)\n";
  return {write_config(rc), csv_path.string()};
}

std::vector<std::string> cmd_train(const RunConfig& rc) {
  RunConfig resolved = rc;
  const Tiling tiling = resolve_tiling(rc);
  resolved.tile_rows = tiling.rows;
  resolved.tile_cols = tiling.cols;

  auto topo = make_topology(rc);
  const SamplerConfig scfg = sampler_config(rc);
  const TrainConfig tc = train_config(rc);
  const Backend backend = backend_from_name(rc.backend);
  kern::force_sweep_kernel(rc.kernel.c_str());

  const std::vector<LabeledImage> dataset = parse_idx(rc.images, rc.labels);
  const ExperimentSplit split = build_split(dataset, rc.variant, rc.split_seed);

  Network net = Network::digit_network(topo, tiling);
  net.init_weights(tc.seed, tc.weight_init_range);

  std::string report = "pass,set,images,top1,top2,top3\n";
  std::string log = "pass,mean_abs_dw,train_top1,train_top2,train_top3\n";
  auto report_row = [&](int pass, const char* which, const Scores& s) {
    report += format_int(pass) + "," + std::string(which) + "," + format_int(s.counted) +
              "," + format_double(s.top1) + "," + format_double(s.top2) + "," +
              format_double(s.top3) + "\n";
  };

  Scores s_train = evaluate(net, split.training, backend, scfg, tc,
                            derive_seed(tc.seed, {0x65767472ull /* "evtr" */, 0}));
  Scores s_test = evaluate(net, split.test, backend, scfg, tc,
                           derive_seed(tc.seed, {0x65767465ull /* "evte" */, 0}));
  report_row(0, "train", s_train);
  report_row(0, "test", s_test);
  std::cout << "pass 0: train top-1/2/3 = " << score_triplet(s_train)
            << "  test = " << score_triplet(s_test) << "\n";

  std::vector<int> order(split.training.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);

  for (int pass = 1; pass <= tc.passes; ++pass) {
    if (tc.shuffle_each_pass) {
      SplitMix64 sm(derive_seed(tc.seed, {0x70617373ull /* "pass" */, uint64_t(pass)}));
      for (size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[sm.next() % i]);
    }
    const std::vector<double> before = collect_weights(net);
    for (size_t step = 0; step < order.size(); ++step)
      net.train_cycle(split.training[order[step]], backend, scfg, tc,
                      derive_seed(tc.seed, {0x6379636c65ull /* "cycle" */,
                                            uint64_t(pass), uint64_t(step)}));
    const double dw = mean_abs_delta(before, collect_weights(net));

    s_train = evaluate(net, split.training, backend, scfg, tc,
                       derive_seed(tc.seed, {0x65767472ull, uint64_t(pass)}));
    log += format_int(pass) + "," + format_double(dw) + "," + format_double(s_train.top1) +
           "," + format_double(s_train.top2) + "," + format_double(s_train.top3) + "\n";
    std::cout << "pass " << pass << "/" << tc.passes
              << ": mean |dw| = " << format_double(dw)
              << ", train top-1/2/3 = " << score_triplet(s_train) << "\n";

    if (pass % tc.report_interval == 0 || pass == tc.passes) {
      s_test = evaluate(net, split.test, backend, scfg, tc,
                        derive_seed(tc.seed, {0x65767465ull, uint64_t(pass)}));
      report_row(pass, "train", s_train);
      report_row(pass, "test", s_test);
      std::cout << "  test top-1/2/3 = " << score_triplet(s_test) << "\n";
    }
  }

  const fs::path out(rc.out);
  atomic_write(out / "split.txt", split_manifest(split));
  atomic_write(out / "train_log.csv", log);
  atomic_write(out / "report.csv", report);
  write_checkpoint(out / "checkpoint.bin", net, tc, tc.passes, rc.variant, rc.split_seed);
  return {write_config(resolved), (out / "split.txt").string(),
          (out / "train_log.csv").string(), (out / "report.csv").string(),
          (out / "checkpoint.bin").string()};
}

std::vector<std::string> cmd_test(const RunConfig& rc) {
  if (rc.set != "train" && rc.set != "test")
    throw ValueError("set must be 'train' or 'test'");
  Checkpoint ck = read_checkpoint(rc.checkpoint);
  const SamplerConfig scfg = sampler_config(rc);
  const Backend backend = backend_from_name(rc.backend);
  kern::force_sweep_kernel(rc.kernel.c_str());

  const std::vector<LabeledImage> dataset = parse_idx(rc.images, rc.labels);
  const ExperimentSplit split = build_split(dataset, ck.variant, ck.split_seed);
  const std::vector<LabeledImage>& items = rc.set == "train" ? split.training : split.test;

  const Scores s = evaluate(ck.net, items, backend, scfg, ck.cfg,
                            derive_seed(rc.seed, {0x74657374ull /* "test" */}));

  std::string report = "pass,set,images,top1,top2,top3\n";
  report += format_int(ck.passes_done) + "," + rc.set + "," + format_int(s.counted) + "," +
            format_double(s.top1) + "," + format_double(s.top2) + "," +
            format_double(s.top3) + "\n";
  const fs::path report_path = fs::path(rc.out) / "report.csv";
  atomic_write(report_path, report);

  std::cout << rc.set << " set after " << ck.passes_done
            << " passes: top-1/2/3 = " << score_triplet(s) << " over " << s.counted
            << " images\n";
  return {write_config(rc), report_path.string()};
}

std::vector<std::string> cmd_sample(const RunConfig& rc) {
  if (rc.problem.empty()) throw ValueError("sample: a problem file is required");
  if (rc.num_reads < 1) throw ValueError("num_reads must be >= 1");
  const Problem p = read_problem(rc.problem);
  const SamplerConfig scfg = sampler_config(rc);
  kern::force_sweep_kernel(rc.kernel.c_str());

  const SampleSet ss = backend_from_name(rc.backend) == Backend::gibbs
                           ? gibbs_sample(p, rc.num_reads, scfg)
                           : exact_sample(p, rc.num_reads, scfg);

  const fs::path csv_path = fs::path(rc.out) / "samples.csv";
  atomic_write(csv_path, sampleset_to_csv(p.topo(), ss));

  size_t best = 0;
  for (size_t i = 1; i < ss.energies.size(); ++i)
    if (ss.energies[i] < ss.energies[best]) best = i;
  std::string bits;
  for (int q : p.topo().active_sites()) bits += ss.assignments[best][q] ? '1' : '0';
  std::cout << ss.num_reads << " reads written\n"
            << "lowest energy " << format_double(ss.energies[best])
            << " at active-site assignment " << bits << "\n";
  return {write_config(rc), csv_path.string()};
}

}  // namespace cbm
