// Experiment runner: single runs, flag-ablation sweeps, and a small
// alternating-dimension GNN-style demo, all over the simulated machine.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pimcc/collectives.hpp"
#include "pimcc/error.hpp"
#include "pimcc/oracle.hpp"
#include "pimcc/rng.hpp"

using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitConstraint = 3;
constexpr int kExitMismatch = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::uint32_t channels = 1;
  std::uint32_t ranks = 1;
  std::vector<std::uint32_t> dims;
  std::string mask;
  pimcc::Primitive primitive = pimcc::Primitive::alltoall;
  pimcc::ElementType dtype = pimcc::ElementType::u64;
  pimcc::ReduceOp op = pimcc::ReduceOp::sum;
  std::uint64_t bytes_per_pe = 0;
  pimcc::TechniqueFlags flags;
  std::uint64_t base_offset = 0;
  std::uint64_t seed = 0;
  bool strict_groups = false;
  std::uint64_t repeat = 1;
};

struct Options {
  std::string out_path;
  bool csv = false;
  bool self_check = true;
  bool force_strict = false;
};

pimcc::Primitive parse_primitive(const std::string& s) {
  using pimcc::Primitive;
  for (Primitive p : {Primitive::alltoall, Primitive::reduce_scatter, Primitive::all_gather,
                      Primitive::all_reduce, Primitive::scatter, Primitive::gather,
                      Primitive::reduce, Primitive::broadcast})
    if (s == pimcc::primitive_name(p)) return p;
  throw ConfigError("unknown primitive \"" + s + "\"");
}

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw ConfigError("each run config must be a JSON object");
  RunConfig c;
  c.channels = j.value("channels", 1u);
  c.ranks = j.value("ranks", 1u);
  if (!j.contains("dims") || !j.at("dims").is_array())
    throw ConfigError("config needs an integer array \"dims\"");
  for (const auto& d : j.at("dims")) c.dims.push_back(d.get<std::uint32_t>());
  c.mask = j.value("mask", std::string());
  if (c.mask.empty()) throw ConfigError("config needs a bitmap string \"mask\"");
  c.primitive = parse_primitive(j.value("primitive", std::string("alltoall")));
  if (auto t = pimcc::element_type_from_name(j.value("dtype", std::string("u64"))))
    c.dtype = *t;
  else
    throw ConfigError("unknown dtype");
  if (auto o = pimcc::reduce_op_from_name(j.value("op", std::string("sum"))))
    c.op = *o;
  else
    throw ConfigError("unknown op");
  if (!j.contains("bytes_per_pe")) throw ConfigError("config needs \"bytes_per_pe\"");
  c.bytes_per_pe = j.at("bytes_per_pe").get<std::uint64_t>();
  if (j.contains("flags")) {
    const auto& f = j.at("flags");
    if (f.is_string()) {
      if (auto fl = pimcc::flags_from_name(f.get<std::string>()))
        c.flags = *fl;
      else
        throw ConfigError("unknown flags preset \"" + f.get<std::string>() + "\"");
    } else if (f.is_object()) {
      c.flags.pr = f.value("pr", false);
      c.flags.im = f.value("im", false);
      c.flags.cm = f.value("cm", false);
    } else {
      throw ConfigError("\"flags\" must be a preset name or an object");
    }
  }
  c.base_offset = j.value("base_offset", std::uint64_t{0});
  c.seed = j.value("seed", std::uint64_t{0});
  c.strict_groups = j.value("strict_groups", false);
  c.repeat = j.value("repeat", std::uint64_t{1});
  if (c.repeat == 0) throw ConfigError("\"repeat\" must be at least 1");
  return c;
}

std::vector<json> load_config_entries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j = json::parse(in);  // throws json::parse_error
  std::vector<json> entries;
  if (j.is_array())
    for (auto& e : j) entries.push_back(e);
  else
    entries.push_back(j);
  if (entries.empty()) throw ConfigError("config file holds no run entries");
  return entries;
}

std::uint64_t input_bytes(pimcc::Primitive p, std::uint64_t bpp) {
  using pimcc::Primitive;
  return (p == Primitive::scatter || p == Primitive::broadcast) ? 0 : bpp;
}

std::uint64_t output_bytes_pe(pimcc::Primitive p, std::uint64_t bpp, std::uint64_t G) {
  using pimcc::Primitive;
  switch (p) {
    case Primitive::reduce_scatter: return bpp / G;
    case Primitive::all_gather: return G * bpp;
    case Primitive::gather:
    case Primitive::reduce: return 0;
    default: return bpp;
  }
}

void fill_pe_region(pimcc::PimMachine& m, pimcc::PeId pe, std::uint64_t base, std::uint64_t len,
                    std::uint64_t seed) {
  m.ensure_mram(pe, base + len);
  pimcc::Rng rng(seed ^ (0x5151bead00000000ull + pe));
  auto& mem = m.mram(pe);
  for (std::uint64_t i = 0; i < len; ++i) mem[base + i] = rng.next_byte();
}

std::vector<std::uint8_t> random_bytes(std::uint64_t len, std::uint64_t seed) {
  pimcc::Rng rng(seed);
  std::vector<std::uint8_t> v(len);
  for (auto& b : v) b = rng.next_byte();
  return v;
}

// One prepared run: machine with seeded inputs plus root-side buffers.
struct Prepared {
  pimcc::Topology topo;
  pimcc::HypercubeConfig hc;
  std::vector<pimcc::CommGroup> groups;
  std::uint64_t G = 0;
  pimcc::CommRequest req;
  pimcc::PimMachine machine;
  pimcc::HostBuffers root_in;
  pimcc::HostBuffers root_out;
  bool needs_in = false;
  bool needs_out = false;
};

Prepared prepare(const RunConfig& c) {
  using pimcc::Primitive;
  pimcc::Topology topo = pimcc::make_topology(c.channels, c.ranks);
  pimcc::HypercubeConfig hc = pimcc::make_hypercube(c.dims, topo);
  pimcc::CommRequest req;
  req.primitive = c.primitive;
  req.dtype = c.dtype;
  req.op = c.op;
  req.bytes_per_pe = c.bytes_per_pe;
  req.mask = pimcc::parse_mask(c.mask, hc);
  req.flags = c.flags;
  req.base_offset = c.base_offset;

  Prepared p{topo, hc, pimcc::slice_groups(hc, req.mask), 0, req, pimcc::PimMachine(topo), {}, {},
             false, false};
  p.G = p.groups[0].members.size();
  p.needs_in = c.primitive == Primitive::scatter || c.primitive == Primitive::broadcast;
  p.needs_out = c.primitive == Primitive::gather || c.primitive == Primitive::reduce;

  std::uint64_t in = input_bytes(c.primitive, c.bytes_per_pe);
  for (const auto& g : p.groups)
    for (pimcc::PeId pe : g.members) fill_pe_region(p.machine, pe, c.base_offset, in, c.seed);
  if (p.needs_in) {
    std::uint64_t want =
        c.primitive == Primitive::scatter ? p.G * c.bytes_per_pe : c.bytes_per_pe;
    for (std::size_t gi = 0; gi < p.groups.size(); ++gi)
      p.root_in.per_group.push_back(random_bytes(want, c.seed ^ (0xb0075eedull + gi)));
  }
  return p;
}

// Re-derives the expected result with the plain-array oracle and compares it
// against the machine state (and host outputs).
bool verify_against_oracle(Prepared& p, const std::vector<pimcc::PlainGroupState>& before) {
  using pimcc::Primitive;
  std::uint64_t out_len = output_bytes_pe(p.req.primitive, p.req.bytes_per_pe, p.G);
  for (std::size_t gi = 0; gi < p.groups.size(); ++gi) {
    const std::vector<std::uint8_t>* root =
        p.needs_in ? &p.root_in.per_group[gi] : nullptr;
    pimcc::OracleResult want;
    if (p.req.primitive == Primitive::scatter || p.req.primitive == Primitive::broadcast) {
      pimcc::PlainGroupState st;
      st.members.assign(p.G, std::vector<std::uint8_t>(p.req.bytes_per_pe));
      want = pimcc::oracle_run(p.req.primitive, st, p.req.dtype, p.req.op, root);
    } else {
      want = pimcc::oracle_run(p.req.primitive, before[gi], p.req.dtype, p.req.op, root);
    }
    if (p.needs_out) {
      if (p.root_out.per_group[gi] != want.host_out) return false;
      continue;
    }
    for (std::size_t mi = 0; mi < p.groups[gi].members.size(); ++mi) {
      const auto& mem = p.machine.mram(p.groups[gi].members[mi]);
      if (mem.size() < p.req.base_offset + out_len) return false;
      if (!std::equal(want.state.members[mi].begin(), want.state.members[mi].begin() + out_len,
                      mem.begin() + p.req.base_offset))
        return false;
    }
  }
  return true;
}

std::vector<pimcc::PlainGroupState> capture_before(Prepared& p) {
  std::vector<pimcc::PlainGroupState> states;
  std::uint64_t in = input_bytes(p.req.primitive, p.req.bytes_per_pe);
  for (const auto& g : p.groups) {
    pimcc::PlainGroupState st;
    for (pimcc::PeId pe : g.members) {
      const auto& mem = p.machine.mram(pe);
      st.members.emplace_back(mem.begin() + p.req.base_offset,
                              mem.begin() + p.req.base_offset + in);
    }
    states.push_back(std::move(st));
  }
  return states;
}

void warn_small_groups(const Prepared& p, bool strict) {
  if (!strict && p.G < 8)
    std::cerr << "warning: communication groups span " << p.G
              << " PEs (< 8, split entangled group); hardware-faithful runs use --strict-groups\n";
}

// Runs one config entry once; returns the report. Throws on violation;
// oracle mismatch reported through `mismatch`.
pimcc::RunReport execute(const RunConfig& c, const Options& opt, bool* mismatch) {
  Prepared p = prepare(c);
  pimcc::EngineOptions eopts;
  eopts.strict_groups = c.strict_groups || opt.force_strict;
  pimcc::validate_request(p.req, p.hc, eopts);
  warn_small_groups(p, eopts.strict_groups);
  std::vector<pimcc::PlainGroupState> before;
  if (opt.self_check) before = capture_before(p);
  pimcc::RunReport r = pimcc::run_request(p.machine, p.hc, p.req, p.needs_in ? &p.root_in : nullptr,
                                          p.needs_out ? &p.root_out : nullptr, eopts);
  if (opt.self_check && !verify_against_oracle(p, before)) *mismatch = true;
  return r;
}

std::ostream& open_out(const Options& opt, std::ofstream& file) {
  if (opt.out_path.empty()) return std::cout;
  file.open(opt.out_path);
  if (!file) throw ConfigError("cannot open output file " + opt.out_path);
  return file;
}

int cmd_run(const std::string& config_path, const Options& opt) {
  auto entries = load_config_entries(config_path);
  std::ofstream file;
  std::ostream& out = open_out(opt, file);
  if (opt.csv) out << pimcc::RunReport::csv_header() << "\n";
  for (const auto& e : entries) {
    RunConfig c = parse_run_config(e);
    for (std::uint64_t rep = 0; rep < c.repeat; ++rep) {
      bool mismatch = false;
      pimcc::RunReport r = execute(c, opt, &mismatch);
      if (mismatch) {
        std::cerr << "self-check failed: machine result does not match the reference for "
                  << pimcc::primitive_name(c.primitive) << "\n";
        return kExitMismatch;
      }
      out << (opt.csv ? r.to_csv_row() : r.to_json()) << "\n";
    }
  }
  return 0;
}

pimcc::TechniqueFlags clamp_flags(pimcc::TechniqueFlags want, pimcc::Primitive p,
                                  pimcc::ElementType dtype) {
  pimcc::TechniqueFlags app = pimcc::applicable_flags(p, dtype);
  pimcc::TechniqueFlags f;
  f.pr = want.pr && app.pr;
  f.im = want.im && app.im;
  f.cm = want.cm && app.cm;
  if (f.im) f.pr = true;
  if (!f.im) f.cm = false;
  return f;
}

int cmd_ablation(const std::string& config_path, const Options& opt) {
  auto entries = load_config_entries(config_path);
  std::ofstream file;
  std::ostream& out = open_out(opt, file);
  out << pimcc::RunReport::csv_header() << "\n";
  const char* presets[] = {"baseline", "pr", "pr+im", "full"};
  for (const auto& e : entries) {
    RunConfig c = parse_run_config(e);
    for (const char* preset : presets) {
      RunConfig step = c;
      step.flags = clamp_flags(*pimcc::flags_from_name(preset), c.primitive, c.dtype);
      bool mismatch = false;
      pimcc::RunReport r = execute(step, opt, &mismatch);
      if (mismatch) {
        std::cerr << "self-check failed during ablation preset " << preset << "\n";
        return kExitMismatch;
      }
      out << r.to_csv_row() << "\n";
    }
  }
  return 0;
}

// ---- demo: alternating-dimension GNN-style pipeline --------------------

struct DemoConfig {
  std::uint32_t channels = 1;
  std::uint32_t ranks = 1;
  std::vector<std::uint32_t> dims;
  std::uint32_t layers = 3;
  std::uint64_t feature_elems = 8192;  // u32 elements per PE
  std::uint64_t seed = 7;
};

DemoConfig parse_demo_config(const json& j) {
  if (!j.is_object()) throw ConfigError("demo config must be a JSON object");
  DemoConfig c;
  c.channels = j.value("channels", 1u);
  c.ranks = j.value("ranks", 1u);
  if (!j.contains("dims") || !j.at("dims").is_array())
    throw ConfigError("demo config needs \"dims\"");
  for (const auto& d : j.at("dims")) c.dims.push_back(d.get<std::uint32_t>());
  if (c.dims.size() != 2) throw ConfigError("demo runs on a 2-D hypercube");
  c.layers = j.value("layers", 3u);
  c.feature_elems = j.value("feature_elems", std::uint64_t{8192});
  c.seed = j.value("seed", std::uint64_t{7});
  return c;
}

void mul_region_u32(std::vector<std::uint8_t>& bytes, std::size_t off, std::size_t len,
                    std::uint32_t factor) {
  for (std::size_t i = off; i + 4 <= off + len; i += 4) {
    std::uint32_t v = static_cast<std::uint32_t>(bytes[i]) |
                      (static_cast<std::uint32_t>(bytes[i + 1]) << 8) |
                      (static_cast<std::uint32_t>(bytes[i + 2]) << 16) |
                      (static_cast<std::uint32_t>(bytes[i + 3]) << 24);
    v *= factor;
    bytes[i] = static_cast<std::uint8_t>(v);
    bytes[i + 1] = static_cast<std::uint8_t>(v >> 8);
    bytes[i + 2] = static_cast<std::uint8_t>(v >> 16);
    bytes[i + 3] = static_cast<std::uint8_t>(v >> 24);
  }
}

void demo_phase_report(std::ostream& out, const std::string& phase, const pimcc::RunReport& r) {
  out << "{\"phase\":\"" << phase << "\",\"report\":" << r.to_json() << "}\n";
}

int cmd_demo(const std::string& config_path, const Options& opt) {
  auto entries = load_config_entries(config_path);
  std::ofstream file;
  std::ostream& out = open_out(opt, file);
  for (const auto& e : entries) {
    DemoConfig c = parse_demo_config(e);
    pimcc::Topology topo = pimcc::make_topology(c.channels, c.ranks);
    pimcc::HypercubeConfig hc = pimcc::make_hypercube(c.dims, topo);
    const std::uint64_t nodes = hc.nodes();
    const std::uint64_t bpp0 = c.feature_elems * 4;
    pimcc::EngineOptions eopts;
    eopts.strict_groups = opt.force_strict;

    pimcc::PimMachine m(topo);
    pimcc::DimMask all_mask = pimcc::parse_mask(std::string(c.dims.size(), '1'), hc);
    auto all_groups = pimcc::slice_groups(hc, all_mask);

    // Single root buffer per group (the full cube is one group here).
    pimcc::HostBuffers scatter_in;
    for (std::size_t gi = 0; gi < all_groups.size(); ++gi)
      scatter_in.per_group.push_back(
          random_bytes(all_groups[gi].members.size() * bpp0, c.seed ^ (0xfeedull + gi)));

    // Plain single-buffer reference, one array per hypercube node.
    std::vector<std::vector<std::uint8_t>> ref(nodes);
    for (std::size_t gi = 0; gi < all_groups.size(); ++gi)
      for (std::size_t mi = 0; mi < all_groups[gi].members.size(); ++mi)
        ref[all_groups[gi].members[mi]].assign(
            scatter_in.per_group[gi].begin() + mi * bpp0,
            scatter_in.per_group[gi].begin() + (mi + 1) * bpp0);

    auto run_phase = [&](pimcc::Primitive prim, const std::string& mask, std::uint64_t bpp,
                         pimcc::HostBuffers* in, pimcc::HostBuffers* root_out,
                         const std::string& label) {
      pimcc::CommRequest req;
      req.primitive = prim;
      req.dtype = pimcc::ElementType::u32;
      req.op = pimcc::ReduceOp::sum;
      req.bytes_per_pe = bpp;
      req.mask = pimcc::parse_mask(mask, hc);
      req.flags = clamp_flags(pimcc::TechniqueFlags{true, true, true}, prim,
                              pimcc::ElementType::u32);
      pimcc::RunReport r = pimcc::run_request(m, hc, req, in, root_out, eopts);
      demo_phase_report(out, label, r);
    };

    run_phase(pimcc::Primitive::scatter, std::string(c.dims.size(), '1'), bpp0, &scatter_in,
              nullptr, "scatter");

    pimcc::Rng wrng(c.seed * 0x2545f4914f6cdd1dull + 1);
    std::uint64_t bpp = bpp0;
    std::string mask = "10";
    for (std::uint32_t layer = 0; layer < c.layers; ++layer) {
      std::uint32_t f1 = static_cast<std::uint32_t>(wrng.next()) | 1u;
      std::uint32_t f2 = static_cast<std::uint32_t>(wrng.next()) | 1u;
      auto dim_groups = pimcc::slice_groups(hc, pimcc::parse_mask(mask, hc));
      std::uint64_t G = dim_groups[0].members.size();

      // Local kernel stub: elementwise scale on every node.
      for (std::uint64_t n = 0; n < nodes; ++n) {
        auto& mem = m.mram(static_cast<pimcc::PeId>(n));
        mul_region_u32(mem, 0, bpp, f1);
        mul_region_u32(ref[n], 0, bpp, f1);
      }
      run_phase(pimcc::Primitive::reduce_scatter, mask, bpp, nullptr, nullptr,
                "layer" + std::to_string(layer) + ".reduce_scatter");
      // Reference reduce_scatter.
      {
        std::vector<std::vector<std::uint8_t>> next(nodes);
        std::uint64_t slot = bpp / G;
        for (const auto& g : dim_groups)
          for (std::size_t p = 0; p < g.members.size(); ++p) {
            std::vector<std::uint8_t> acc(slot, 0);
            for (std::size_t q = 0; q < g.members.size(); ++q)
              pimcc::reduce_bytes(acc.data(), acc.data(),
                                  ref[g.members[q]].data() + p * slot, slot,
                                  pimcc::ElementType::u32, pimcc::ReduceOp::sum);
            next[g.members[p]] = std::move(acc);
          }
        ref = std::move(next);
        bpp = slot;
      }

      for (std::uint64_t n = 0; n < nodes; ++n) {
        auto& mem = m.mram(static_cast<pimcc::PeId>(n));
        mul_region_u32(mem, 0, bpp, f2);
        mul_region_u32(ref[n], 0, bpp, f2);
      }
      run_phase(pimcc::Primitive::all_reduce, mask, bpp, nullptr, nullptr,
                "layer" + std::to_string(layer) + ".all_reduce");
      {
        for (const auto& g : dim_groups) {
          std::vector<std::uint8_t> acc(bpp, 0);
          for (std::size_t q = 0; q < g.members.size(); ++q)
            pimcc::reduce_bytes(acc.data(), acc.data(), ref[g.members[q]].data(), bpp,
                                pimcc::ElementType::u32, pimcc::ReduceOp::sum);
          for (std::size_t p = 0; p < g.members.size(); ++p) ref[g.members[p]] = acc;
        }
      }
      mask = mask == "10" ? "01" : "10";
    }

    pimcc::HostBuffers final_out;
    run_phase(pimcc::Primitive::reduce, std::string(c.dims.size(), '1'), bpp, nullptr, &final_out,
              "reduce");
    bool pass = true;
    for (std::size_t gi = 0; gi < all_groups.size(); ++gi) {
      std::vector<std::uint8_t> acc(bpp, 0);
      for (pimcc::PeId pe : all_groups[gi].members)
        pimcc::reduce_bytes(acc.data(), acc.data(), ref[pe].data(), bpp, pimcc::ElementType::u32,
                            pimcc::ReduceOp::sum);
      if (final_out.per_group[gi] != acc) pass = false;
    }
    out << (pass ? "PASS" : "FAIL") << "\n";
    if (!pass) {
      std::cerr << "demo result does not match the dense reference\n";
      return kExitMismatch;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collective-communication simulator for PIM-enabled DIMMs"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--out", opt.out_path, "write reports to this file instead of stdout");
  app.add_flag("--csv", opt.csv, "emit CSV rows instead of JSON");
  app.add_flag_callback("--no-self-check", [&] { opt.self_check = false; },
                        "skip the oracle verification after each run");
  app.add_flag("--strict-groups", opt.force_strict,
               "reject communication groups smaller than 8 PEs");

  std::string run_cfg, abl_cfg, demo_cfg;
  CLI::App* run = app.add_subcommand("run", "execute configured collective runs");
  run->add_option("config", run_cfg, "JSON config file")->required();
  CLI::App* abl = app.add_subcommand("ablation", "run the 4-preset flag ablation");
  abl->add_option("config", abl_cfg, "JSON config file")->required();
  CLI::App* demo = app.add_subcommand("demo-gnn", "alternating-dimension GNN-style demo");
  demo->add_option("config", demo_cfg, "JSON config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_cfg, opt);
    if (abl->parsed()) return cmd_ablation(abl_cfg, opt);
    return cmd_demo(demo_cfg, opt);
  } catch (const json::exception& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const pimcc::Error& e) {
    std::cerr << "constraint violation: " << e.what() << "\n";
    return kExitConstraint;
  }
}
