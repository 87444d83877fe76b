#include "clonedetect/matching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "clonedetect/errors.hpp"

namespace clonedetect {

namespace {

bool pair_order(const MatchPair& p, const MatchPair& q) {
    if (p.a.y != q.a.y) return p.a.y < q.a.y;
    if (p.a.x != q.a.x) return p.a.x < q.a.x;
    if (p.b.y != q.b.y) return p.b.y < q.b.y;
    return p.b.x < q.b.x;
}

bool footprints_overlap(Shift s, int block_size) {
    return std::abs(s.dx) < block_size && std::abs(s.dy) < block_size;
}

FeatureMatrix gather_rows(const FeatureMatrix& fm, const std::vector<std::int64_t>& perm) {
    FeatureMatrix out;
    out.dim = fm.dim;
    out.block_size = fm.block_size;
    out.source_width = fm.source_width;
    out.source_height = fm.source_height;
    out.scale = fm.scale;
    out.values.resize(fm.values.size());
    out.origins.resize(fm.origins.size());
    const int d = fm.dim;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        const std::int64_t src = perm[i];
        std::copy_n(fm.values.data() + static_cast<std::size_t>(src) * d, d,
                    out.values.data() + i * d);
        out.origins[i] = fm.origins[static_cast<std::size_t>(src)];
    }
    return out;
}

// Bijective order-preserving packing of one row into a 64-bit key: each
// column contributes bit_width(max - min) bits, most significant first.
// Keys compare equal exactly when rows compare equal.
struct PackPlan {
    bool feasible = false;
    std::vector<std::int64_t> mins;
    std::vector<int> bits;
};

PackPlan plan_packing(const FeatureMatrix& fm) {
    PackPlan plan;
    const int d = fm.dim;
    const long long n = fm.row_count();
    if (d < 1 || n == 0) return plan;
    plan.mins.assign(static_cast<std::size_t>(d), 0);
    plan.bits.assign(static_cast<std::size_t>(d), 0);
    std::vector<std::int64_t> maxs(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) {
        plan.mins[c] = fm.values[static_cast<std::size_t>(c)];
        maxs[c] = plan.mins[c];
    }
    for (long long r = 1; r < n; ++r) {
        const std::int64_t* row = fm.values.data() + static_cast<std::size_t>(r) * d;
        for (int c = 0; c < d; ++c) {
            plan.mins[c] = std::min(plan.mins[c], row[c]);
            maxs[c] = std::max(maxs[c], row[c]);
        }
    }
    int total = 0;
    for (int c = 0; c < d; ++c) {
        const std::uint64_t span = static_cast<std::uint64_t>(maxs[c]) -
                                   static_cast<std::uint64_t>(plan.mins[c]);
        plan.bits[c] = std::bit_width(span);
        total += plan.bits[c];
        if (plan.bits[c] > 63 || total > 64) return plan;
    }
    plan.feasible = true;
    return plan;
}

LexSortResult lex_sort_packed(const FeatureMatrix& fm, const PackPlan& plan) {
    const int d = fm.dim;
    const long long n = fm.row_count();
    struct Entry {
        std::uint64_t key;
        std::int64_t index;
    };
    std::vector<Entry> entries(static_cast<std::size_t>(n));
    for (long long r = 0; r < n; ++r) {
        const std::int64_t* row = fm.values.data() + static_cast<std::size_t>(r) * d;
        std::uint64_t key = 0;
        for (int c = 0; c < d; ++c)
            key = (key << plan.bits[c]) |
                  (static_cast<std::uint64_t>(row[c]) - static_cast<std::uint64_t>(plan.mins[c]));
        entries[static_cast<std::size_t>(r)] = {key, r};
    }
    const Point* origins = fm.origins.data();
    std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
        if (a.key != b.key) return a.key < b.key;
        return raster_less(origins[a.index], origins[b.index]);
    });

    LexSortResult out;
    out.permutation.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < entries.size(); ++i) out.permutation[i] = entries[i].index;
    out.sorted = gather_rows(fm, out.permutation);
    return out;
}

}  // namespace

Shift canonical_shift(Shift v) {
    if (v.dx > 0 || (v.dx == 0 && v.dy > 0)) return v;
    return {-v.dx, -v.dy};
}

MatchPair make_pair(Point first, Point second) {
    if (raster_less(second, first)) std::swap(first, second);
    return MatchPair{first, second,
                     canonical_shift({second.x - first.x, second.y - first.y})};
}

LexSortResult detail::lex_sort_generic(const FeatureMatrix& fm) {
    const long long n = fm.row_count();
    std::vector<std::int64_t> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);

    const int d = fm.dim;
    const std::int64_t* values = fm.values.data();
    const Point* origins = fm.origins.data();
    std::sort(perm.begin(), perm.end(), [&](std::int64_t i, std::int64_t j) {
        const std::int64_t* a = values + static_cast<std::size_t>(i) * d;
        const std::int64_t* b = values + static_cast<std::size_t>(j) * d;
        for (int k = 0; k < d; ++k)
            if (a[k] != b[k]) return a[k] < b[k];
        // duplicate descriptors: deterministic tie-break by origin (y, x)
        return raster_less(origins[i], origins[j]);
    });

    LexSortResult out;
    out.permutation = std::move(perm);
    out.sorted = gather_rows(fm, out.permutation);
    return out;
}

LexSortResult lex_sort(const FeatureMatrix& fm) {
    if (fm.row_count() > 0) {
        const PackPlan plan = plan_packing(fm);
        if (plan.feasible) return lex_sort_packed(fm, plan);
    }
    return detail::lex_sort_generic(fm);
}

std::vector<MatchPair> candidate_pairs(const FeatureMatrix& sorted, int window,
                                       bool overlap_guard) {
    if (window < 1) throw InvalidInput("candidate_pairs: window must be >= 1");
    const long long n = sorted.row_count();
    const int d = sorted.dim;
    const std::int64_t* values = sorted.values.data();

    std::vector<MatchPair> pairs;
    for (long long i = 0; i < n; ++i) {
        const std::int64_t* row_i = values + static_cast<std::size_t>(i) * d;
        const long long j_end = std::min(n - 1, i + window);
        for (long long j = i + 1; j <= j_end; ++j) {
            const std::int64_t* row_j = values + static_cast<std::size_t>(j) * d;
            // rows are sorted, so the first mismatch ends this neighborhood
            if (!std::equal(row_i, row_i + d, row_j)) break;
            MatchPair pair = make_pair(sorted.origins[static_cast<std::size_t>(i)],
                                       sorted.origins[static_cast<std::size_t>(j)]);
            if (overlap_guard && footprints_overlap(pair.shift, sorted.block_size)) continue;
            pairs.push_back(pair);
        }
    }
    std::sort(pairs.begin(), pairs.end(), pair_order);
    return pairs;
}

long long ShiftHistogram::count_for(Shift source_shift) const {
    const Shift c = canonical_shift(source_shift);
    const auto it = bins.find({c.dx * scale, c.dy * scale});
    return it == bins.end() ? 0 : it->second;
}

ShiftHistogram shift_histogram(const std::vector<MatchPair>& pairs, int scale) {
    ShiftHistogram hist;
    hist.scale = scale;
    for (const MatchPair& p : pairs) ++hist.bins[{p.shift.dx * scale, p.shift.dy * scale}];
    return hist;
}

std::vector<MatchPair> filter_by_shift(const std::vector<MatchPair>& pairs,
                                       const ShiftHistogram& hist, long long threshold) {
    if (threshold < 1) throw InvalidInput("filter_by_shift: threshold must be >= 1");
    std::vector<MatchPair> accepted;
    for (const MatchPair& p : pairs)
        if (hist.count_for(p.shift) >= threshold) accepted.push_back(p);
    return accepted;
}

long long DetectionMask::labeled_count() const {
    long long n = 0;
    for (std::uint8_t l : labels) n += l != 0;
    return n;
}

DetectionMask build_mask(const std::vector<MatchPair>& accepted, const FeatureMatrix& fm,
                         int image_width, int image_height) {
    DetectionMask mask = DetectionMask::empty(image_width, image_height);
    const int side = fm.block_size * fm.scale;
    auto paint = [&](Point origin, MaskLabel label) {
        const int x0 = origin.x * fm.scale;
        const int y0 = origin.y * fm.scale;
        for (int y = y0; y < std::min(y0 + side, image_height); ++y)
            for (int x = x0; x < std::min(x0 + side, image_width); ++x)
                mask.set(x, y, label);
    };
    // paint all sources first so that a pixel claimed by both sides stays target
    for (const MatchPair& p : accepted) paint(p.a, MaskLabel::source);
    for (const MatchPair& p : accepted) paint(p.b, MaskLabel::target);
    return mask;
}

std::vector<MatchPair> exhaustive_match(const std::vector<Block>& blocks, double eps,
                                        bool discard_overlapping) {
    if (eps < 0.0) throw InvalidInput("exhaustive_match: eps must be >= 0");
    std::vector<MatchPair> pairs;
    const std::size_t n = blocks.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Block& bi = blocks[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const Block& bj = blocks[j];
            if (bj.samples.size() != bi.samples.size()) continue;
            bool equal = true;
            for (std::size_t k = 0; k < bi.samples.size(); ++k) {
                if (std::fabs(bi.samples[k] - bj.samples[k]) > eps) {
                    equal = false;
                    break;
                }
            }
            if (!equal) continue;
            MatchPair pair = make_pair(bi.origin, bj.origin);
            if (discard_overlapping && footprints_overlap(pair.shift, bi.size)) continue;
            pairs.push_back(pair);
        }
    }
    std::sort(pairs.begin(), pairs.end(), pair_order);
    return pairs;
}

}  // namespace clonedetect
