#include <cstring>
#include <optional>
#include <vector>

#include "collectives_detail.hpp"
#include "pimcc/error.hpp"

namespace pimcc::detail {

namespace {

std::vector<EntangledGroup> eg_objects(PimMachine& m, const Clique& c) {
  std::vector<EntangledGroup> egs;
  egs.reserve(c.egs.size());
  for (auto id : c.egs) egs.push_back(entangled_group_by_id(m.topology(), id));
  return egs;
}

// After the pre-kernels, the burst at (eg i, region j, position sigma) holds
// one lane-rotated column of everything destined to entangled group j. The
// rotation is undone in flight: in the PIM domain directly under cm, through
// the transpose otherwise. Blocks with zero rotation pass through untouched.
Block64 realign(PimMachine& m, const Clique& c, const Ctx& ctx, const Block64& b, unsigned k) {
  if (k % c.w == 0) return b;
  if (ctx.req.flags.cm) return modulate_lanes(m, c, b, k);
  return m.dt(modulate_words(m, c, m.dt(b), k));
}

void stream_alltoall(PimMachine& m, const Ctx& ctx, const Clique& c) {
  const std::uint64_t base = ctx.req.base_offset;
  const std::uint64_t S = ctx.S, W = ctx.w * ctx.S;
  auto egs = eg_objects(m, c);
  // Regions are exchanged pairwise and crosswise so every burst address is
  // read before it is rewritten.
  for (std::size_t i = 0; i < egs.size(); ++i) {
    for (std::size_t j = i; j < egs.size(); ++j) {
      for (unsigned sigma = 0; sigma < ctx.w; ++sigma) {
        unsigned k = (ctx.w - sigma) % ctx.w;
        for (std::uint64_t u = 0; u < S; u += 8) {
          std::uint64_t off_i = base + j * W + sigma * S + u;  // on eg i
          std::uint64_t off_j = base + i * W + sigma * S + u;  // on eg j
          if (i == j) {
            Block64 b = m.read_burst(egs[i], off_i);
            write_burst_blend(m, c, egs[i], off_i, realign(m, c, ctx, b, k));
          } else {
            Block64 a = m.read_burst(egs[i], off_i);
            Block64 b = m.read_burst(egs[j], off_j);
            write_burst_blend(m, c, egs[j], off_j, realign(m, c, ctx, a, k));
            write_burst_blend(m, c, egs[i], off_i, realign(m, c, ctx, b, k));
          }
        }
      }
    }
  }
}

void stream_all_gather(PimMachine& m, const Ctx& ctx, const Clique& c) {
  const std::uint64_t base = ctx.req.base_offset;
  const std::uint64_t N = ctx.req.bytes_per_pe;
  const bool cm = ctx.req.flags.cm;
  auto egs = eg_objects(m, c);
  const std::size_t K = egs.size();
  for (std::uint64_t u = 0; u < N; u += 8) {
    // All contributions at this word offset are loaded before any write;
    // the first destination slot aliases the source region.
    std::vector<Block64> r(K);
    for (std::size_t i = 0; i < K; ++i) r[i] = m.read_burst(egs[i], base + u);
    for (std::size_t i = 0; i < K; ++i) {
      std::optional<Block64> host;
      for (unsigned rho = 0; rho < ctx.w; ++rho) {
        Block64 blk;
        if (rho == 0) {
          blk = r[i];
        } else if (cm) {
          blk = modulate_lanes(m, c, r[i], rho);
        } else {
          if (!host) host = m.dt(r[i]);
          blk = m.dt(modulate_words(m, c, *host, rho));
        }
        std::uint64_t off = base + (rho + ctx.w * i) * N + u;
        for (std::size_t j = 0; j < K; ++j) write_burst_blend(m, c, egs[j], off, blk);
      }
    }
  }
}

void stream_reduce_scatter(PimMachine& m, const Ctx& ctx, const Clique& c) {
  const std::uint64_t base = ctx.req.base_offset;
  const std::uint64_t S = ctx.S, W = ctx.w * ctx.S;
  const bool cm = ctx.req.flags.cm;
  auto egs = eg_objects(m, c);
  const std::size_t K = egs.size();
  for (std::size_t j = 0; j < K; ++j) {
    for (std::uint64_t u = 0; u < S; u += 8) {
      Block64 acc = identity_block(ctx.req.dtype, ctx.req.op);
      for (std::size_t i = 0; i < K; ++i) {
        for (unsigned sigma = 0; sigma < ctx.w; ++sigma) {
          Block64 b = m.read_burst(egs[i], base + j * W + sigma * S + u);
          b = modulate_lanes(m, c, b, (ctx.w - sigma) % ctx.w);
          if (!cm) b = m.dt(b);
          acc = m.reduce(acc, b, ctx.req.dtype, ctx.req.op);
        }
      }
      if (!cm) acc = m.dt(acc);
      write_burst_blend(m, c, egs[j], base + u, acc);
    }
  }
}

void stream_all_reduce(PimMachine& m, const Ctx& ctx, const Clique& c) {
  const std::uint64_t base = ctx.req.base_offset;
  const std::uint64_t S = ctx.S, W = ctx.w * ctx.S;
  const bool cm = ctx.req.flags.cm;
  auto egs = eg_objects(m, c);
  const std::size_t K = egs.size();
  for (std::size_t j = 0; j < K; ++j) {
    for (std::uint64_t u = 0; u < S; u += 8) {
      // Read set and write set for this (j, u) are the same addresses, so
      // everything is loaded up front.
      std::vector<Block64> r;
      r.reserve(K * ctx.w);
      for (std::size_t i = 0; i < K; ++i)
        for (unsigned sigma = 0; sigma < ctx.w; ++sigma)
          r.push_back(m.read_burst(egs[i], base + j * W + sigma * S + u));
      Block64 acc = identity_block(ctx.req.dtype, ctx.req.op);
      std::size_t idx = 0;
      for (std::size_t i = 0; i < K; ++i) {
        for (unsigned sigma = 0; sigma < ctx.w; ++sigma) {
          Block64 b = modulate_lanes(m, c, r[idx++], (ctx.w - sigma) % ctx.w);
          if (!cm) b = m.dt(b);
          acc = m.reduce(acc, b, ctx.req.dtype, ctx.req.op);
        }
      }
      if (!cm) acc = m.dt(acc);  // back to the PIM domain for distribution
      for (unsigned rho = 0; rho < ctx.w; ++rho) {
        Block64 blk = modulate_lanes(m, c, acc, rho);
        std::uint64_t off = base + (rho + ctx.w * j) * S + u;
        for (std::size_t jj = 0; jj < K; ++jj) write_burst_blend(m, c, egs[jj], off, blk);
      }
    }
  }
}

void stream_reduce(PimMachine& m, const Ctx& ctx, const Clique& c, HostBuffers* root_out) {
  const std::uint64_t base = ctx.req.base_offset;
  const std::uint64_t S = ctx.S, W = ctx.w * ctx.S;
  const bool cm = ctx.req.flags.cm;
  auto egs = eg_objects(m, c);
  const std::size_t K = egs.size();
  for (std::size_t s = 0; s < c.group_index.size(); ++s)
    root_out->per_group[c.group_index[s]].resize(ctx.req.bytes_per_pe);
  for (std::size_t j = 0; j < K; ++j) {
    for (std::uint64_t u = 0; u < S; u += 8) {
      Block64 acc = identity_block(ctx.req.dtype, ctx.req.op);
      for (std::size_t i = 0; i < K; ++i) {
        for (unsigned sigma = 0; sigma < ctx.w; ++sigma) {
          Block64 b = m.read_burst(egs[i], base + j * W + sigma * S + u);
          b = modulate_lanes(m, c, b, (ctx.w - sigma) % ctx.w);
          if (!cm) b = m.dt(b);
          acc = m.reduce(acc, b, ctx.req.dtype, ctx.req.op);
        }
      }
      // Lane seq[d] of acc now holds the full fold of slot (j, d).
      for (std::size_t s = 0; s < c.group_index.size(); ++s) {
        auto& out = root_out->per_group[c.group_index[s]];
        for (unsigned d = 0; d < ctx.w; ++d) {
          unsigned l = c.lanes[s][d];
          std::uint8_t* dst = out.data() + (d + ctx.w * j) * S + u;
          if (cm)
            for (unsigned beat = 0; beat < 8; ++beat) dst[beat] = acc.bytes[beat * 8 + l];
          else
            std::memcpy(dst, acc.bytes.data() + l * 8, 8);
        }
      }
    }
  }
}

}  // namespace

void run_streamed(PimMachine& m, const Ctx& ctx, const HostBuffers* root_in,
                  HostBuffers* root_out) {
  const Primitive p = ctx.req.primitive;
  switch (p) {
    case Primitive::scatter:
    case Primitive::gather:
    case Primitive::broadcast:
      // No inter-PE exchange; the staged engine already runs these without
      // touching the staging area when im is set.
      run_staged(m, ctx, root_in, root_out);
      return;
    case Primitive::reduce_scatter:
    case Primitive::all_reduce:
    case Primitive::reduce: {
      bool unused = false;
      for (const Clique& c : ctx.cliques) unused |= c.has_unused;
      if (!ctx.slotted || unused) {
        // Sizes not divisible by 8 * group size cannot be localized into
        // per-destination slots, and split groups leave dead lanes in every
        // burst-wide fold. Both cases fall back to whole-image register
        // processing, still with zero staging.
        run_staged(m, ctx, root_in, root_out);
        return;
      }
      break;
    }
    default:
      break;
  }

  if (ctx.req.flags.pr && has_pre_kernels(ctx)) run_pre_kernels(m, ctx);
  for (const Clique& c : ctx.cliques) {
    switch (p) {
      case Primitive::alltoall: stream_alltoall(m, ctx, c); break;
      case Primitive::all_gather: stream_all_gather(m, ctx, c); break;
      case Primitive::reduce_scatter: stream_reduce_scatter(m, ctx, c); break;
      case Primitive::all_reduce: stream_all_reduce(m, ctx, c); break;
      case Primitive::reduce: stream_reduce(m, ctx, c, root_out); break;
      default: break;
    }
  }
  if (ctx.req.flags.pr && has_post_kernels(ctx)) run_post_kernels(m, ctx);
}

}  // namespace pimcc::detail
