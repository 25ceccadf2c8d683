#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pimcc/hypercube.hpp"
#include "pimcc/machine.hpp"
#include "pimcc/oracle.hpp"

namespace pimcc {

// pr: PE-assisted reordering. im: in-register modulation (requires pr).
// cm: cross-domain modulation (requires im; only legal for primitives
// without host arithmetic at the given dtype).
struct TechniqueFlags {
  bool pr = false;
  bool im = false;
  bool cm = false;

  friend bool operator==(const TechniqueFlags&, const TechniqueFlags&) = default;
};

const char* flags_name(const TechniqueFlags& f);  // "baseline", "pr", "pr+im", "full"
std::optional<TechniqueFlags> flags_from_name(const std::string& s);

// Largest flag set applicable to (primitive, dtype); inapplicable bits of a
// requested preset are dropped by the ablation driver, never silently by
// run_request.
TechniqueFlags applicable_flags(Primitive p, ElementType dtype);

struct CommRequest {
  Primitive primitive = Primitive::alltoall;
  ElementType dtype = ElementType::u64;
  ReduceOp op = ReduceOp::sum;          // reduction primitives only
  std::uint64_t bytes_per_pe = 0;
  DimMask mask;
  TechniqueFlags flags;
  std::uint64_t base_offset = 0;
};

// Root-side buffers for the rooted primitives, one per communication group
// in slice_groups order.
struct HostBuffers {
  std::vector<std::vector<std::uint8_t>> per_group;
};

struct EngineOptions {
  bool strict_groups = false;  // reject communication groups smaller than 8 PEs
};

struct RunReport {
  Primitive primitive;
  ElementType dtype;
  ReduceOp op;
  std::vector<std::uint32_t> dims;
  std::string mask;
  std::uint64_t group_size = 0;
  std::uint64_t groups = 0;
  std::uint64_t bytes_per_pe = 0;
  TechniqueFlags flags;
  CostCounters counters;  // delta for this run

  std::string to_json() const;
  std::string to_csv_row() const;
  static std::string csv_header();
};

// Validates the request against the hypercube and engine options; throws
// Error on violation. Exposed so callers can pre-check configs.
void validate_request(const CommRequest& req, const HypercubeConfig& hc,
                      const EngineOptions& opts);

// Executes one collective over all group slices. root_in supplies scatter /
// broadcast inputs; root_out receives gather / reduce outputs.
RunReport run_request(PimMachine& m, const HypercubeConfig& hc, const CommRequest& req,
                      const HostBuffers* root_in = nullptr, HostBuffers* root_out = nullptr,
                      const EngineOptions& opts = {});

}  // namespace pimcc
