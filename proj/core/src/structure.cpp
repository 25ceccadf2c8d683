#include <algorithm>
#include <cstring>
#include <map>
#include <string>

#include "collectives_detail.hpp"
#include "pimcc/error.hpp"

namespace pimcc::detail {

bool pr_applicable(Primitive p) {
  switch (p) {
    case Primitive::alltoall:
    case Primitive::reduce_scatter:
    case Primitive::all_gather:
    case Primitive::all_reduce:
    case Primitive::reduce:
      return true;
    default:
      return false;
  }
}

bool cm_applicable(Primitive p, ElementType dtype) {
  switch (p) {
    case Primitive::alltoall:
    case Primitive::all_gather:
      return true;
    case Primitive::reduce_scatter:
    case Primitive::all_reduce:
    case Primitive::reduce:
      // Byte-wise reductions commute with the transpose, so the domain
      // transfer can be elided entirely.
      return dtype == ElementType::u8;
    default:
      return false;
  }
}

// Every group induced by one mask decomposes as lane-sequence x entangled
// group list, lane position varying fastest. This follows from the node
// linearization (dim 0 fastest, strides ascending), so a failure here is an
// engine bug, not a user error.
static void decompose_group(const CommGroup& g, std::vector<std::uint8_t>& lane_seq,
                            std::vector<std::uint32_t>& egs) {
  const std::size_t G = g.members.size();
  lane_seq.clear();
  egs.clear();
  egs.push_back(entangled_group_id(g.members[0]));
  std::size_t w = G;
  for (std::size_t m = 1; m < G; ++m) {
    if (entangled_group_id(g.members[m]) != egs[0]) {
      w = m;
      break;
    }
  }
  if (G % w != 0) raise(Errc::constraint_violation, "group does not factor over entangled groups");
  for (std::size_t m = 0; m < w; ++m) lane_seq.push_back(static_cast<std::uint8_t>(lane_of(g.members[m])));
  for (std::size_t i = w; i < G; i += w) egs.push_back(entangled_group_id(g.members[i]));
  for (std::size_t m = 0; m < G; ++m) {
    PeId expect = egs[m / w] * 8 + lane_seq[m % w];
    if (g.members[m] != expect)
      raise(Errc::constraint_violation, "group member order is not lane-major over entangled groups");
  }
  for (std::size_t i = 1; i < egs.size(); ++i)
    if (egs[i] <= egs[i - 1])
      raise(Errc::constraint_violation, "entangled groups of a slice are not ascending");
}

static std::vector<Clique> build_cliques(const std::vector<CommGroup>& groups) {
  std::map<std::vector<std::uint32_t>, std::size_t> by_egs;
  std::vector<Clique> cliques;
  std::vector<std::uint8_t> lane_seq;
  std::vector<std::uint32_t> egs;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    decompose_group(groups[gi], lane_seq, egs);
    auto [it, fresh] = by_egs.try_emplace(egs, cliques.size());
    if (fresh) {
      Clique c;
      c.egs = egs;
      c.w = static_cast<unsigned>(lane_seq.size());
      cliques.push_back(std::move(c));
    }
    Clique& c = cliques[it->second];
    if (lane_seq.size() != c.w)
      raise(Errc::constraint_violation, "sibling groups disagree on lane count");
    c.group_index.push_back(gi);
    c.lanes.push_back(lane_seq);
  }
  for (auto& c : cliques) {
    c.owner.fill(-1);
    c.lane_idx.fill(-1);
    for (std::size_t s = 0; s < c.lanes.size(); ++s)
      for (std::size_t d = 0; d < c.lanes[s].size(); ++d) {
        std::uint8_t l = c.lanes[s][d];
        if (c.owner[l] != -1) raise(Errc::constraint_violation, "lane shared by sibling groups");
        c.owner[l] = static_cast<std::int8_t>(s);
        c.lane_idx[l] = static_cast<std::int8_t>(d);
      }
    c.has_unused = std::any_of(c.owner.begin(), c.owner.end(), [](std::int8_t o) { return o < 0; });
    c.aligned_runs = true;
    for (const auto& seq : c.lanes) {
      bool run = seq[0] % c.w == 0;
      for (std::size_t d = 1; d < seq.size() && run; ++d) run = seq[d] == seq[0] + d;
      if (!run) {
        c.aligned_runs = false;
        break;
      }
    }
  }
  return cliques;
}

Ctx build_ctx(const HypercubeConfig& hc, const CommRequest& req, const EngineOptions& opts) {
  Ctx ctx;
  ctx.hc = &hc;
  ctx.req = req;
  ctx.opts = opts;
  ctx.groups = slice_groups(hc, req.mask);
  ctx.cliques = build_cliques(ctx.groups);
  ctx.G = ctx.groups[0].members.size();
  ctx.w = ctx.cliques[0].w;
  ctx.K = ctx.G / ctx.w;
  ctx.slotted = req.bytes_per_pe % (8 * ctx.G) == 0;
  ctx.S = ctx.slotted ? req.bytes_per_pe / ctx.G : 0;

  const std::uint64_t bpp = req.bytes_per_pe;
  switch (req.primitive) {
    case Primitive::alltoall: ctx.in_bytes_pe = bpp; ctx.out_bytes_pe = bpp; break;
    case Primitive::reduce_scatter: ctx.in_bytes_pe = bpp; ctx.out_bytes_pe = ctx.S; break;
    case Primitive::all_gather: ctx.in_bytes_pe = bpp; ctx.out_bytes_pe = ctx.G * bpp; break;
    case Primitive::all_reduce: ctx.in_bytes_pe = bpp; ctx.out_bytes_pe = bpp; break;
    case Primitive::scatter: ctx.in_bytes_pe = 0; ctx.out_bytes_pe = bpp; break;
    case Primitive::gather: ctx.in_bytes_pe = bpp; ctx.out_bytes_pe = 0; break;
    case Primitive::reduce: ctx.in_bytes_pe = bpp; ctx.out_bytes_pe = 0; break;
    case Primitive::broadcast: ctx.in_bytes_pe = 0; ctx.out_bytes_pe = bpp; break;
  }
  return ctx;
}

bool has_pre_kernels(const Ctx& ctx) {
  switch (ctx.req.primitive) {
    case Primitive::alltoall:
    case Primitive::reduce_scatter:
      return true;
    case Primitive::all_reduce:
    case Primitive::reduce:
      return true;  // identity kernels in the non-slotted fallback
    default:
      return false;
  }
}

bool has_post_kernels(const Ctx& ctx) {
  switch (ctx.req.primitive) {
    case Primitive::alltoall:
    case Primitive::all_gather:
      return true;
    case Primitive::all_reduce:
      return ctx.slotted;
    default:
      return false;
  }
}

// Localization kernels. Slotted form: each member rotates the w sub-blocks of
// every eg-sized region left by its own in-lane position, so that one burst
// column afterwards holds data for a single destination lane modulo a lane
// rotation. Non-slotted all_reduce/reduce run identity kernels: the PEs are
// still dispatched (and billed) even though no bytes change place.
void run_pre_kernels(PimMachine& m, const Ctx& ctx) {
  const Primitive p = ctx.req.primitive;
  const std::uint64_t base = ctx.req.base_offset;
  bool slotted_form = ctx.slotted &&
                      (p == Primitive::alltoall || p == Primitive::reduce_scatter ||
                       p == Primitive::all_reduce || p == Primitive::reduce);
  for (const auto& g : ctx.groups) {
    for (std::size_t mi = 0; mi < g.members.size(); ++mi) {
      unsigned d = static_cast<unsigned>(mi % ctx.w);
      if (slotted_form) {
        const std::uint64_t W = ctx.w * ctx.S;
        for (std::uint64_t r = 0; r < ctx.K; ++r)
          m.pe_kernel_block_rotate(g.members[mi], base + r * W, ctx.S, ctx.w, d % ctx.w);
      } else {
        m.pe_kernel_block_rotate(g.members[mi], base, ctx.req.bytes_per_pe, 1, 0);
      }
    }
  }
}

void run_post_kernels(PimMachine& m, const Ctx& ctx) {
  const Primitive p = ctx.req.primitive;
  const std::uint64_t base = ctx.req.base_offset;
  for (const auto& g : ctx.groups) {
    for (std::size_t mi = 0; mi < g.members.size(); ++mi) {
      unsigned a = static_cast<unsigned>(mi % ctx.w);
      if (p == Primitive::alltoall) {
        std::vector<std::uint32_t> perm(ctx.w);
        for (unsigned q = 0; q < ctx.w; ++q) perm[q] = (a + ctx.w - q) % ctx.w;
        const std::uint64_t W = ctx.w * ctx.S;
        for (std::uint64_t r = 0; r < ctx.K; ++r)
          m.pe_kernel_permute(g.members[mi], base + r * W, ctx.S, perm);
      } else if (p == Primitive::all_gather) {
        const std::uint64_t N = ctx.req.bytes_per_pe;
        for (std::uint64_t r = 0; r < ctx.K; ++r)
          m.pe_kernel_block_rotate(g.members[mi], base + r * ctx.w * N, N, ctx.w,
                                   (ctx.w - a) % ctx.w);
      } else {  // all_reduce, slotted
        const std::uint64_t W = ctx.w * ctx.S;
        for (std::uint64_t r = 0; r < ctx.K; ++r)
          m.pe_kernel_block_rotate(g.members[mi], base + r * W, ctx.S, ctx.w, (ctx.w - a) % ctx.w);
      }
    }
  }
}

static void rotate_blocks(std::uint8_t* region, std::uint64_t block, unsigned n, unsigned left_by) {
  if (left_by % n == 0) return;
  std::vector<std::uint8_t> tmp(region, region + block * n);
  for (unsigned s = 0; s < n; ++s)
    std::memcpy(region + s * block, tmp.data() + ((s + left_by) % n) * block, block);
}

static void permute_blocks(std::uint8_t* region, std::uint64_t block, unsigned n,
                           const std::vector<unsigned>& perm) {
  std::vector<std::uint8_t> tmp(region, region + block * n);
  for (unsigned s = 0; s < n; ++s)
    std::memcpy(region + s * block, tmp.data() + perm[s] * block, block);
}

void invert_pre_plain(std::vector<std::uint8_t>& img, unsigned lane_idx, const Ctx& ctx) {
  const Primitive p = ctx.req.primitive;
  bool slotted_form = ctx.slotted &&
                      (p == Primitive::alltoall || p == Primitive::reduce_scatter ||
                       p == Primitive::all_reduce || p == Primitive::reduce);
  if (!slotted_form) return;
  const std::uint64_t W = ctx.w * ctx.S;
  for (std::uint64_t r = 0; r < ctx.K; ++r)
    rotate_blocks(img.data() + r * W, ctx.S, ctx.w, (ctx.w - lane_idx % ctx.w) % ctx.w);
}

void invert_post_plain(std::vector<std::uint8_t>& img, unsigned lane_idx, const Ctx& ctx) {
  const Primitive p = ctx.req.primitive;
  const unsigned a = lane_idx % ctx.w;
  if (p == Primitive::alltoall) {
    // The per-region permutation q -> (a - q) mod w is an involution.
    std::vector<unsigned> perm(ctx.w);
    for (unsigned q = 0; q < ctx.w; ++q) perm[q] = (a + ctx.w - q) % ctx.w;
    const std::uint64_t W = ctx.w * ctx.S;
    for (std::uint64_t r = 0; r < ctx.K; ++r) permute_blocks(img.data() + r * W, ctx.S, ctx.w, perm);
  } else if (p == Primitive::all_gather) {
    const std::uint64_t N = ctx.req.bytes_per_pe;
    for (std::uint64_t r = 0; r < ctx.K; ++r)
      rotate_blocks(img.data() + r * ctx.w * N, N, ctx.w, a);
  } else if (p == Primitive::all_reduce && ctx.slotted) {
    const std::uint64_t W = ctx.w * ctx.S;
    for (std::uint64_t r = 0; r < ctx.K; ++r) rotate_blocks(img.data() + r * W, ctx.S, ctx.w, a);
  }
}

static std::array<std::uint8_t, 8> sibling_rot_perm(const Clique& c, unsigned k) {
  std::array<std::uint8_t, 8> perm;
  for (unsigned l = 0; l < 8; ++l) perm[l] = static_cast<std::uint8_t>(l);
  for (const auto& seq : c.lanes)
    for (unsigned d = 0; d < c.w; ++d) perm[seq[d]] = seq[(d + k) % c.w];
  return perm;
}

Block64 modulate_lanes(PimMachine& m, const Clique& c, const Block64& b, unsigned k) {
  k %= c.w;
  if (k == 0) return b;
  if (c.aligned_runs) return m.rot_lane(b, k, c.w);
  return m.permute_lanes(b, sibling_rot_perm(c, k));
}

Block64 modulate_words(PimMachine& m, const Clique& c, const Block64& b, unsigned k) {
  k %= c.w;
  if (k == 0) return b;
  if (c.aligned_runs) return m.rot_word(b, k, c.w);
  return m.permute_words(b, sibling_rot_perm(c, k));
}

void write_burst_blend(PimMachine& m, const Clique& c, const EntangledGroup& eg,
                       std::uint64_t offset, Block64 b) {
  if (c.has_unused) {
    Block64 orig = m.read_burst(eg, offset);
    for (unsigned l = 0; l < 8; ++l)
      if (c.owner[l] < 0)
        for (unsigned beat = 0; beat < 8; ++beat) b.bytes[beat * 8 + l] = orig.bytes[beat * 8 + l];
  }
  m.write_burst(eg, offset, b);
}

}  // namespace pimcc::detail
