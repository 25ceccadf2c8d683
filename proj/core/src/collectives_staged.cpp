#include <algorithm>
#include <cstring>
#include <vector>

#include "collectives_detail.hpp"
#include "pimcc/error.hpp"

namespace pimcc::detail {

namespace {

// Element-wise fold of src into acc through the instrumented facade, one
// reduce application per 64-byte chunk. Short tails are padded with the
// identity element, which leaves the folded bytes unchanged.
void staged_fold(PimMachine& m, std::uint8_t* acc, const std::uint8_t* src, std::size_t len,
                 ElementType dtype, ReduceOp op) {
  for (std::size_t off = 0; off < len; off += 64) {
    std::size_t n = std::min<std::size_t>(64, len - off);
    Block64 a = identity_block(dtype, op);
    Block64 b = identity_block(dtype, op);
    std::memcpy(a.bytes.data(), acc + off, n);
    std::memcpy(b.bytes.data(), src + off, n);
    Block64 r = m.reduce(a, b, dtype, op);
    std::memcpy(acc + off, r.bytes.data(), n);
  }
}

// images[s][mi]: plain host-domain bytes of member mi of the clique's
// sibling group s.
using Images = std::vector<std::vector<std::vector<std::uint8_t>>>;

// Models the host passing a burst through the staging area; the staged
// baseline pays this per burst actually moved, unused lanes included.
void charge_block(PimMachine& m, const Block64& b, unsigned passes) {
  for (unsigned i = 0; i < passes; ++i) m.host_unstage(m.host_stage(b.bytes));
}

// use_dt false is the cross-domain (cm) path: at byte granularity the lane
// bytes are picked out of the burst directly, no transpose needed.
// stage_passes: staging-area traversals per burst (stage-in plus, at
// baseline, the host-side localization or alignment pass the PEs skipped).
Images read_images(PimMachine& m, const Ctx& ctx, const Clique& c, std::uint64_t len,
                   bool use_dt, unsigned stage_passes) {
  Images img(c.group_index.size());
  for (auto& g : img) g.assign(ctx.G, std::vector<std::uint8_t>(len));
  const Topology& topo = m.topology();
  for (std::size_t i = 0; i < c.egs.size(); ++i) {
    EntangledGroup eg = entangled_group_by_id(topo, c.egs[i]);
    for (std::uint64_t u = 0; u < len; u += 8) {
      Block64 b = m.read_burst(eg, ctx.req.base_offset + u);
      charge_block(m, b, stage_passes);
      if (use_dt) b = m.dt(b);
      for (unsigned l = 0; l < 8; ++l) {
        if (c.owner[l] < 0) continue;
        std::size_t mi = static_cast<std::size_t>(c.lane_idx[l]) + ctx.w * i;
        std::uint8_t* dst = img[c.owner[l]][mi].data() + u;
        if (use_dt)
          std::memcpy(dst, b.bytes.data() + l * 8, 8);
        else
          for (unsigned beat = 0; beat < 8; ++beat) dst[beat] = b.bytes[beat * 8 + l];
      }
    }
  }
  return img;
}

void write_images(PimMachine& m, const Ctx& ctx, const Clique& c, const Images& img,
                  std::uint64_t len, bool use_dt, unsigned stage_passes) {
  const Topology& topo = m.topology();
  for (std::size_t i = 0; i < c.egs.size(); ++i) {
    EntangledGroup eg = entangled_group_by_id(topo, c.egs[i]);
    for (std::uint64_t u = 0; u < len; u += 8) {
      Block64 b;
      for (unsigned l = 0; l < 8; ++l) {
        if (c.owner[l] < 0) continue;
        std::size_t mi = static_cast<std::size_t>(c.lane_idx[l]) + ctx.w * i;
        const std::uint8_t* src = img[c.owner[l]][mi].data() + u;
        if (use_dt)
          std::memcpy(b.bytes.data() + l * 8, src, 8);
        else
          for (unsigned beat = 0; beat < 8; ++beat) b.bytes[beat * 8 + l] = src[beat];
      }
      if (use_dt) b = m.dt(b);
      charge_block(m, b, stage_passes);
      write_burst_blend(m, c, eg, ctx.req.base_offset + u, b);
    }
  }
}

void charge_stage_one(PimMachine& m, const std::vector<std::uint8_t>& buf) {
  m.host_unstage(m.host_stage(buf));
}

}  // namespace

void run_staged(PimMachine& m, const Ctx& ctx, const HostBuffers* root_in, HostBuffers* root_out) {
  const Primitive p = ctx.req.primitive;
  const bool pr = ctx.req.flags.pr && pr_applicable(p);
  const bool stage = !ctx.req.flags.im && p != Primitive::broadcast;
  const bool use_dt = !ctx.req.flags.cm;

  if (pr && has_pre_kernels(ctx)) run_pre_kernels(m, ctx);

  // Stage-in pass per burst read, plus a second host-side localization pass
  // at baseline when the PEs did not pre-rotate the data.
  const unsigned in_passes = stage ? 1u + (has_pre_kernels(ctx) && !pr ? 1u : 0u) : 0u;
  const unsigned out_passes = stage ? 1u + (has_post_kernels(ctx) && !pr ? 1u : 0u) : 0u;

  for (const Clique& c : ctx.cliques) {
    Images in;
    if (ctx.in_bytes_pe > 0) {
      in = read_images(m, ctx, c, ctx.in_bytes_pe, use_dt, in_passes);
      if (pr) {
        for (auto& g : in)
          for (std::size_t mi = 0; mi < g.size(); ++mi)
            invert_pre_plain(g[mi], static_cast<unsigned>(mi % ctx.w), ctx);
      }
    }

    Images out(c.group_index.size());
    for (std::size_t s = 0; s < c.group_index.size(); ++s) {
      const std::size_t gi = c.group_index[s];
      auto& o = out[s];
      switch (p) {
        case Primitive::alltoall: {
          o.assign(ctx.G, std::vector<std::uint8_t>(ctx.req.bytes_per_pe));
          for (std::uint64_t q = 0; q < ctx.G; ++q)
            for (std::uint64_t mi = 0; mi < ctx.G; ++mi)
              std::memcpy(o[mi].data() + q * ctx.S, in[s][q].data() + mi * ctx.S, ctx.S);
          break;
        }
        case Primitive::reduce_scatter: {
          o.assign(ctx.G, std::vector<std::uint8_t>(ctx.S));
          for (std::uint64_t mi = 0; mi < ctx.G; ++mi) {
            std::memcpy(o[mi].data(), in[s][0].data() + mi * ctx.S, ctx.S);
            for (std::uint64_t q = 1; q < ctx.G; ++q)
              staged_fold(m, o[mi].data(), in[s][q].data() + mi * ctx.S, ctx.S, ctx.req.dtype,
                          ctx.req.op);
          }
          break;
        }
        case Primitive::all_gather: {
          o.assign(ctx.G, std::vector<std::uint8_t>(ctx.G * ctx.req.bytes_per_pe));
          for (std::uint64_t mi = 0; mi < ctx.G; ++mi)
            for (std::uint64_t q = 0; q < ctx.G; ++q)
              std::memcpy(o[mi].data() + q * ctx.req.bytes_per_pe, in[s][q].data(),
                          ctx.req.bytes_per_pe);
          break;
        }
        case Primitive::all_reduce: {
          std::vector<std::uint8_t> acc = in[s][0];
          for (std::uint64_t q = 1; q < ctx.G; ++q)
            staged_fold(m, acc.data(), in[s][q].data(), acc.size(), ctx.req.dtype, ctx.req.op);
          o.assign(ctx.G, acc);
          break;
        }
        case Primitive::scatter: {
          const auto& root = root_in->per_group[gi];
          o.assign(ctx.G, std::vector<std::uint8_t>(ctx.req.bytes_per_pe));
          for (std::uint64_t mi = 0; mi < ctx.G; ++mi)
            std::memcpy(o[mi].data(), root.data() + mi * ctx.req.bytes_per_pe,
                        ctx.req.bytes_per_pe);
          break;
        }
        case Primitive::gather: {
          auto& host = root_out->per_group[gi];
          host.resize(ctx.G * ctx.req.bytes_per_pe);
          for (std::uint64_t q = 0; q < ctx.G; ++q)
            std::memcpy(host.data() + q * ctx.req.bytes_per_pe, in[s][q].data(),
                        ctx.req.bytes_per_pe);
          if (stage) charge_stage_one(m, host);
          break;
        }
        case Primitive::reduce: {
          auto& host = root_out->per_group[gi];
          host = in[s][0];
          for (std::uint64_t q = 1; q < ctx.G; ++q)
            staged_fold(m, host.data(), in[s][q].data(), host.size(), ctx.req.dtype, ctx.req.op);
          if (stage) charge_stage_one(m, host);
          break;
        }
        case Primitive::broadcast: {
          o.assign(ctx.G, root_in->per_group[gi]);
          break;
        }
      }
    }

    if (ctx.out_bytes_pe > 0) {
      if (pr && has_post_kernels(ctx)) {
        for (auto& g : out)
          for (std::size_t mi = 0; mi < g.size(); ++mi)
            invert_post_plain(g[mi], static_cast<unsigned>(mi % ctx.w), ctx);
      }
      write_images(m, ctx, c, out, ctx.out_bytes_pe, use_dt, out_passes);
    }
  }

  if (pr && has_post_kernels(ctx)) run_post_kernels(m, ctx);
}

}  // namespace pimcc::detail
