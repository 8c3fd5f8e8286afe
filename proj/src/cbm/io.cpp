#include "cbm/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cbm/errors.hpp"

namespace cbm {

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + tmp.string());
    out.write(contents.data(), std::streamsize(contents.size()));
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_int(long long v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string problem_to_text(const Problem& p) {
  const Topology& t = p.topo();
  std::string out = "topology chimera " + format_int(t.rows()) + " " +
                    format_int(t.cols()) + "\n";
  if (!t.inactive_sites().empty()) {
    out += "inactive";
    for (int q : t.inactive_sites()) out += " " + format_int(q);
    out += "\n";
  }
  for (int q : t.active_sites())
    if (p.linear(q) != 0.0)
      out += "linear " + format_int(q) + " " + format_double(p.linear(q)) + "\n";
  const auto& cs = t.couplers();
  const auto& quad = p.quadratic_terms();
  for (size_t ci = 0; ci < cs.size(); ++ci)
    if (quad[ci] != 0.0)
      out += "quadratic " + format_int(cs[ci].a) + " " + format_int(cs[ci].b) +
             " " + format_double(quad[ci]) + "\n";
  return out;
}

Problem problem_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::shared_ptr<const Topology> topo;
  struct Lin { int q; double v; };
  struct Quad { int a, b; double v; };
  std::vector<Lin> lins;
  std::vector<Quad> quads;
  int rows = 0, cols = 0;
  std::vector<int> inactive;
  bool have_topo = false;

  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw) || kw[0] == '#') continue;
    auto bad = [&](const std::string& why) {
      throw DataError("problem text line " + format_int(lineno) + ": " + why);
    };
    if (kw == "topology") {
      std::string family;
      if (!(ls >> family >> rows >> cols) || family != "chimera")
        bad("expected 'topology chimera R C'");
      have_topo = true;
    } else if (kw == "inactive") {
      int q;
      while (ls >> q) inactive.push_back(q);
    } else if (kw == "linear") {
      Lin l{};
      if (!(ls >> l.q >> l.v)) bad("expected 'linear i v'");
      lins.push_back(l);
    } else if (kw == "quadratic") {
      Quad qd{};
      if (!(ls >> qd.a >> qd.b >> qd.v)) bad("expected 'quadratic i j v'");
      quads.push_back(qd);
    } else {
      bad("unknown statement '" + kw + "'");
    }
  }
  if (!have_topo) throw DataError("problem text: missing topology line");

  try {
    topo = std::make_shared<Topology>(Topology::build(rows, cols, inactive));
    Problem p(topo);
    for (const auto& l : lins) p.set_linear(l.q, l.v);
    for (const auto& qd : quads) p.set_quadratic(qd.a, qd.b, qd.v);
    return p;
  } catch (const ValueError& e) {
    throw DataError(std::string("problem text: ") + e.what());
  }
}

Problem read_problem(const std::filesystem::path& path) {
  return problem_from_text(read_file(path));
}

void write_problem(const std::filesystem::path& path, const Problem& p) {
  atomic_write(path, problem_to_text(p));
}

std::string sampleset_to_csv(const Topology& topo, const SampleSet& ss) {
  std::string out;
  for (int q = 0; q < topo.num_sites(); ++q) out += "q" + format_int(q) + ",";
  out += "energy\n";
  for (int r = 0; r < ss.num_reads; ++r) {
    const Assignment& a = ss.assignments[r];
    for (int q = 0; q < topo.num_sites(); ++q) out += a[q] ? "1," : "0,";
    out += format_double(ss.energies[r]) + "\n";
  }
  return out;
}

namespace {

constexpr char kMagic[8] = {'C', 'B', 'N', 'E', 'T', '0', '0', '1'};

void put_u32(std::string& s, uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  s.append(b, 4);
}
void put_u64(std::string& s, uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  s.append(b, 8);
}
void put_f64(std::string& s, double v) {
  char b[8];
  std::memcpy(b, &v, 8);
  s.append(b, 8);
}
void put_vec(std::string& s, const std::vector<double>& v) {
  put_u64(s, v.size());
  for (double x : v) put_f64(s, x);
}

struct Reader {
  const std::string& s;
  size_t pos = 0;
  void need(size_t n) const {
    if (pos + n > s.size()) throw DataError("checkpoint: truncated");
  }
  uint32_t u32() {
    need(4);
    uint32_t v;
    std::memcpy(&v, s.data() + pos, 4);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v;
    std::memcpy(&v, s.data() + pos, 8);
    pos += 8;
    return v;
  }
  double f64() {
    need(8);
    double v;
    std::memcpy(&v, s.data() + pos, 8);
    pos += 8;
    return v;
  }
  void vec(std::vector<double>& out) {
    const uint64_t n = u64();
    if (n != out.size()) throw DataError("checkpoint: weight block size mismatch");
    for (auto& x : out) x = f64();
  }
};

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const Network& net,
                      const TrainConfig& cfg, int passes_done, int variant,
                      uint64_t split_seed) {
  if (net.hidden_infos().size() != 1)
    throw ValueError("checkpoint: expected a single hidden layer");
  const HiddenInfo& hi = net.hidden_infos()[0];
  const Topology& t = *hi.topo;

  std::string s(kMagic, sizeof kMagic);
  put_u32(s, uint32_t(t.rows()));
  put_u32(s, uint32_t(t.cols()));
  put_u32(s, uint32_t(t.inactive_sites().size()));
  for (int q : t.inactive_sites()) put_u32(s, uint32_t(q));
  put_u32(s, uint32_t(hi.tiling.rows));
  put_u32(s, uint32_t(hi.tiling.cols));

  put_u32(s, uint32_t(net.groups().size()));
  for (const WeightGroup& g : net.groups()) {
    put_u32(s, uint32_t(g.layer_a));
    put_u32(s, uint32_t(g.layer_b));
    put_vec(s, g.w);
  }
  put_vec(s, hi.intra_w);
  put_vec(s, hi.virtual_w);

  put_f64(s, cfg.learning_rate);
  put_u32(s, uint32_t(cfg.phase12_iterations));
  put_u32(s, uint32_t(cfg.reads_per_sample));
  put_u32(s, uint32_t(cfg.passes));
  put_u32(s, cfg.clamp_visible ? 1 : 0);
  put_f64(s, cfg.weight_init_range);
  put_u64(s, cfg.seed);
  put_u32(s, cfg.bias_normalization == BiasNorm::active_mass ? 1 : 0);
  put_u32(s, cfg.train_intra_couplers ? 1 : 0);
  put_u32(s, cfg.shuffle_each_pass ? 1 : 0);
  put_u32(s, uint32_t(cfg.report_interval));

  put_u32(s, uint32_t(passes_done));
  put_u32(s, uint32_t(variant));
  put_u64(s, split_seed);
  atomic_write(path, s);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  const std::string s = read_file(path);
  if (s.size() < sizeof kMagic || std::memcmp(s.data(), kMagic, sizeof kMagic) != 0)
    throw DataError("checkpoint: bad magic/version in " + path.string());
  Reader r{s, sizeof kMagic};

  const int rows = int(r.u32()), cols = int(r.u32());
  std::vector<int> inactive(r.u32());
  for (int& q : inactive) q = int(r.u32());
  Tiling tiling;
  tiling.rows = int(r.u32());
  tiling.cols = int(r.u32());

  Checkpoint ck;
  try {
    auto topo = std::make_shared<Topology>(Topology::build(rows, cols, inactive));
    ck.net = Network::digit_network(std::move(topo), tiling);
  } catch (const ValueError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }

  const uint32_t n_groups = r.u32();
  if (n_groups != ck.net.groups().size())
    throw DataError("checkpoint: weight group count mismatch");
  for (WeightGroup& g : ck.net.groups()) {
    if (int(r.u32()) != g.layer_a || int(r.u32()) != g.layer_b)
      throw DataError("checkpoint: weight group layer mismatch");
    r.vec(g.w);
  }
  HiddenInfo& hi = ck.net.hidden_infos()[0];
  r.vec(hi.intra_w);
  r.vec(hi.virtual_w);

  ck.cfg.learning_rate = r.f64();
  ck.cfg.phase12_iterations = int(r.u32());
  ck.cfg.reads_per_sample = int(r.u32());
  ck.cfg.passes = int(r.u32());
  ck.cfg.clamp_visible = r.u32() != 0;
  ck.cfg.weight_init_range = r.f64();
  ck.cfg.seed = r.u64();
  ck.cfg.bias_normalization = r.u32() ? BiasNorm::active_mass : BiasNorm::layer_size;
  ck.cfg.train_intra_couplers = r.u32() != 0;
  ck.cfg.shuffle_each_pass = r.u32() != 0;
  ck.cfg.report_interval = int(r.u32());

  ck.passes_done = int(r.u32());
  ck.variant = int(r.u32());
  ck.split_seed = r.u64();
  if (r.pos != s.size()) throw DataError("checkpoint: trailing bytes");
  return ck;
}

}  // namespace cbm
