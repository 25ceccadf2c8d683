#include "pimcc/collectives.hpp"

#include <algorithm>
#include <string>

#include "collectives_detail.hpp"
#include "pimcc/error.hpp"

namespace pimcc {

TechniqueFlags applicable_flags(Primitive p, ElementType dtype) {
  TechniqueFlags f;
  bool im_app = p != Primitive::broadcast &&
                (detail::pr_applicable(p) || p == Primitive::scatter || p == Primitive::gather);
  f.im = im_app;
  f.cm = im_app && detail::cm_applicable(p, dtype);
  // The in-register path presumes PE-side localization, so im carries the
  // pr bit even where the PEs have nothing to reorder.
  f.pr = detail::pr_applicable(p) || f.im;
  return f;
}

void validate_request(const CommRequest& req, const HypercubeConfig& hc,
                      const EngineOptions& opts) {
  if (req.mask.bits.size() != hc.dims.size())
    raise(Errc::bad_mask_length, "mask has " + std::to_string(req.mask.bits.size()) +
                                     " bits for " + std::to_string(hc.dims.size()) +
                                     " dimensions");
  if (std::none_of(req.mask.bits.begin(), req.mask.bits.end(), [](bool b) { return b; }))
    raise(Errc::empty_mask, "mask must select at least one dimension");

  const std::uint64_t G = group_size(hc, req.mask);
  if (opts.strict_groups && G < 8)
    raise(Errc::constraint_violation,
          "strict mode: communication groups must span at least 8 PEs (got " +
              std::to_string(G) + ")");

  if (req.bytes_per_pe == 0 || req.bytes_per_pe % 8 != 0)
    raise(Errc::constraint_violation,
          "bytes_per_pe must be a positive multiple of 8 bytes (got " +
              std::to_string(req.bytes_per_pe) + ")");
  bool needs_slots = req.primitive == Primitive::alltoall ||
                     req.primitive == Primitive::reduce_scatter ||
                     req.primitive == Primitive::scatter;
  if (needs_slots && req.bytes_per_pe % (8 * G) != 0)
    raise(Errc::constraint_violation,
          "bytes_per_pe must be a multiple of the communication group size x 8 bytes (" +
              std::to_string(8 * G) + ", got " + std::to_string(req.bytes_per_pe) + ")");
  if (req.base_offset % 8 != 0)
    raise(Errc::misaligned, "base_offset must be a multiple of 8");

  if (req.flags.im && !req.flags.pr)
    raise(Errc::illegal_flags, "im requires pr");
  if (req.flags.cm && !req.flags.im)
    raise(Errc::illegal_flags, "cm requires im");
  if (req.flags.cm && !detail::cm_applicable(req.primitive, req.dtype))
    raise(Errc::illegal_flags,
          std::string("cm is not applicable to ") + primitive_name(req.primitive) +
              " at this dtype (reductions stay in one domain only at u8)");
}

RunReport run_request(PimMachine& m, const HypercubeConfig& hc, const CommRequest& req,
                      const HostBuffers* root_in, HostBuffers* root_out,
                      const EngineOptions& opts) {
  validate_request(req, hc, opts);
  detail::Ctx ctx = detail::build_ctx(hc, req, opts);

  const bool needs_in =
      req.primitive == Primitive::scatter || req.primitive == Primitive::broadcast;
  const bool needs_out = req.primitive == Primitive::gather || req.primitive == Primitive::reduce;
  if (needs_in) {
    if (!root_in) raise(Errc::buffer_count_mismatch, "rooted primitive needs input buffers");
    if (root_in->per_group.size() != ctx.groups.size())
      raise(Errc::buffer_count_mismatch,
            "expected one input buffer per group (" + std::to_string(ctx.groups.size()) +
                "), got " + std::to_string(root_in->per_group.size()));
    std::uint64_t want = req.primitive == Primitive::scatter ? ctx.G * req.bytes_per_pe
                                                             : req.bytes_per_pe;
    for (const auto& b : root_in->per_group)
      if (b.size() != want)
        raise(Errc::size_mismatch, "input buffer must be " + std::to_string(want) + " bytes");
  }
  if (needs_out) {
    if (!root_out) raise(Errc::buffer_count_mismatch, "rooted primitive needs output buffers");
    root_out->per_group.assign(ctx.groups.size(), {});
  }

  const std::uint64_t region_end =
      req.base_offset + std::max(ctx.in_bytes_pe, ctx.out_bytes_pe);
  for (const auto& c : ctx.cliques)
    for (auto id : c.egs) {
      EntangledGroup eg = entangled_group_by_id(m.topology(), id);
      for (PeId pe : eg.members) m.ensure_mram(pe, region_end);
    }

  CostCounters before = m.snapshot_counters();
  if (req.flags.im)
    detail::run_streamed(m, ctx, root_in, root_out);
  else
    detail::run_staged(m, ctx, root_in, root_out);

  RunReport r;
  r.primitive = req.primitive;
  r.dtype = req.dtype;
  r.op = req.op;
  r.dims = hc.dims;
  r.mask = req.mask.text();
  r.group_size = ctx.G;
  r.groups = ctx.groups.size();
  r.bytes_per_pe = req.bytes_per_pe;
  r.flags = req.flags;
  r.counters = m.snapshot_counters() - before;
  return r;
}

}  // namespace pimcc
