#include "hcbox/content.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace hcbox {

double cube_cost(int level, double m) { return std::exp2((level - 1) * m); }

namespace {

// DP over one dyadic tree: min(own cost, sum of child costs). Ancestors of the
// group root never improve the value: replacing a cover cube by its parent
// multiplies its cost by 2^m > 1, so the minimum over all dyadic covers is
// attained inside the per-group trees handled here.
ContentResult solve_tree(const DyadicCube& cube, std::vector<const std::vector<long long>*> cells,
                         int base_level, double m) {
    if (cube.level == base_level) {
        return {cube_cost(base_level, m), {cube}};
    }
    int shift = cube.level - 1 - base_level;
    int nn = cube.n();
    std::vector<std::vector<const std::vector<long long>*>> buckets(1u << nn);
    for (const auto* c : cells) {
        unsigned idx = 0;
        for (int i = 0; i < nn; ++i) {
            long long child_anchor = shift > 62 ? ((*c)[i] < 0 ? -1 : 0) : ((*c)[i] >> shift);
            idx |= static_cast<unsigned>(child_anchor & 1LL) << i;
        }
        buckets[idx].push_back(c);
    }
    double self_cost = cube_cost(cube.level, m);
    double child_sum = 0.0;
    std::vector<DyadicCube> child_witness;
    auto children = cube_children(cube);
    for (unsigned idx = 0; idx < buckets.size(); ++idx) {
        if (buckets[idx].empty()) continue;
        ContentResult sub = solve_tree(children[idx], std::move(buckets[idx]), base_level, m);
        child_sum += sub.value;
        for (auto& w : sub.witness) child_witness.push_back(std::move(w));
    }
    if (self_cost <= child_sum) return {self_cost, {cube}};
    return {child_sum, std::move(child_witness)};
}

int group_root_level(const std::vector<const std::vector<long long>*>& cells, int n,
                     int base_level) {
    int k = 0;
    for (int i = 0; i < n; ++i) {
        long long mx = LLONG_MIN, mn = LLONG_MAX;
        for (const auto* c : cells) {
            mx = std::max(mx, (*c)[i]);
            mn = std::min(mn, (*c)[i]);
        }
        int need;
        if (mn >= 0) {
            need = static_cast<int>(std::bit_width(static_cast<unsigned long long>(mx)));
        } else {
            unsigned long long v = static_cast<unsigned long long>(-mn) - 1ull;
            need = static_cast<int>(std::bit_width(v));
        }
        k = std::max(k, need);
    }
    return base_level + k;
}

}  // namespace

ContentResult hc_dyadic(const VoxelSet& x, const ContentParams& p) {
    if (x.empty()) return {};
    // Cells on opposite sides of a coordinate hyperplane share no dyadic
    // ancestor, so the forest splits by per-axis sign; within a sign group a
    // common root exists and the groups are independent.
    std::map<std::vector<int>, std::vector<const std::vector<long long>*>> groups;
    for (const auto& c : x.cells) {
        std::vector<int> sig(x.n);
        for (int i = 0; i < x.n; ++i) sig[i] = c[i] < 0 ? 1 : 0;
        groups[sig].push_back(&c);
    }
    ContentResult out;
    for (auto& [sig, cells] : groups) {
        int root_level = group_root_level(cells, x.n, x.base_level);
        std::vector<long long> anchor(x.n);
        for (int i = 0; i < x.n; ++i) anchor[i] = sig[i] ? -1 : 0;
        ContentResult sub =
            solve_tree(DyadicCube(root_level, anchor), std::move(cells), x.base_level, p.m);
        out.value += sub.value;
        for (auto& w : sub.witness) out.witness.push_back(std::move(w));
    }
    std::sort(out.witness.begin(), out.witness.end());
    return out;
}

double hc_dyadic_value(const VoxelSet& x, const ContentParams& p) { return hc_dyadic(x, p).value; }

double hc_dyadic_bruteforce(const VoxelSet& x, const ContentParams& p, int max_level) {
    if (x.empty()) return 0.0;
    if (x.size() > 25) throw CapacityError("bruteforce oracle limited to 25 cells");
    std::set<DyadicCube> cand_set;
    for (std::size_t i = 0; i < x.size(); ++i) {
        DyadicCube c = x.cell_cube(i);
        for (int lvl = x.base_level; lvl <= max_level; ++lvl) cand_set.insert(c.ancestor(lvl));
    }
    if (cand_set.size() > (1u << 22)) throw CapacityError("bruteforce candidate budget exceeded");
    struct Cand {
        std::uint32_t mask;
        double w;
    };
    std::vector<Cand> cands;
    cands.reserve(cand_set.size());
    for (const auto& q : cand_set) {
        std::uint32_t mask = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (q.contains(x.cell_cube(i))) mask |= (1u << i);
        cands.push_back({mask, cube_cost(q.level, p.m)});
    }
    std::uint32_t full = x.size() == 32 ? 0xffffffffu : ((1u << x.size()) - 1u);
    std::vector<double> dp(static_cast<std::size_t>(full) + 1,
                           std::numeric_limits<double>::infinity());
    dp[0] = 0.0;
    for (std::uint32_t mask = 0; mask < full; ++mask) {
        if (!std::isfinite(dp[mask])) continue;
        std::uint32_t missing = full & ~mask;
        int cell = std::countr_zero(missing);
        for (const auto& c : cands) {
            if (!(c.mask >> cell & 1u)) continue;
            std::uint32_t nm = mask | c.mask;
            if (dp[mask] + c.w < dp[nm]) dp[nm] = dp[mask] + c.w;
        }
    }
    return dp[full];
}

std::pair<double, double> hc_sandwich(const VoxelSet& x, const ContentParams& p) {
    double upper = hc_dyadic_value(x, p);
    double factor = std::pow(4.0, p.n) * std::exp2(p.m);
    return {upper / factor, upper};
}

namespace {

// Number of multiples of 2^k in the closed interval [lo, hi].
long long lattice_count(const Dyadic& lo, const Dyadic& hi, int k) {
    long long f_hi = floor_div_pow2(hi, k);
    long long c_lo = -floor_div_pow2(-lo, k);
    return f_hi - c_lo + 1;
}

}  // namespace

std::vector<DyadicCube> cover_ball_dyadic(const LinfBall& ball) {
    if (!(ball.radius.sign() > 0)) throw InputError("cover_ball_dyadic: radius must be positive");
    int nn = ball.n();
    DyBox b = ball.box();
    // A ball that is already a dyadic cube covers itself.
    if (ball.radius.num == 1) {
        int lvl = ball.radius.level + 1;  // side = 2r = 2^lvl
        bool dyadic = true;
        std::vector<long long> anchor(nn);
        for (int i = 0; i < nn; ++i) {
            Dyadic lo = b[i].lo;
            long long a = floor_div_pow2(lo, lvl);
            if (Dyadic(a, lvl) != lo) {
                dyadic = false;
                break;
            }
            anchor[i] = a;
        }
        if (dyadic) return {DyadicCube(lvl, anchor)};
    }
    // Per axis: smallest spacing with exactly one lattice vertex inside.
    int d_level_min = INT_MAX;
    for (int i = 0; i < nn; ++i) {
        int k = ball.radius.level + (ball.radius.num == 1 ? 0 : bits_needed_below(ball.radius));
        // Start low enough that at least two vertices exist: 2^k <= r.
        k = ball.radius.level;
        long long v = ball.radius.num;
        while (v > 1) {
            v >>= 1;
            ++k;
        }
        while (lattice_count(b[i].lo, b[i].hi, k) > 1) ++k;
        if (lattice_count(b[i].lo, b[i].hi, k) != 1)
            throw InvariantError("cover_ball_dyadic: no unique-vertex spacing");
        d_level_min = std::min(d_level_min, k);
    }
    // Tile each projection at the minimum spacing.
    std::vector<std::pair<long long, long long>> ranges(nn);
    std::size_t total = 1;
    for (int i = 0; i < nn; ++i) {
        long long a0 = floor_div_pow2(b[i].lo, d_level_min);
        long long a1 = -floor_div_pow2(-b[i].hi, d_level_min);  // ceil
        if (a1 <= a0) a1 = a0 + 1;
        ranges[i] = {a0, a1};
        total *= static_cast<std::size_t>(a1 - a0);
    }
    std::vector<DyadicCube> out;
    out.reserve(total);
    std::vector<long long> idx(nn);
    for (int i = 0; i < nn; ++i) idx[i] = ranges[i].first;
    while (true) {
        out.emplace_back(d_level_min, idx);
        int axis = 0;
        while (axis < nn) {
            if (++idx[axis] < ranges[axis].second) break;
            idx[axis] = ranges[axis].first;
            ++axis;
        }
        if (axis == nn) break;
    }
    return out;
}

double hc_small_m(const VoxelSet& x, double m) {
    if (!(m > 0.0 && m <= 1.0)) throw InputError("hc_small_m requires 0 < m <= 1");
    if (x.empty()) return 0.0;
    // Union-find over cells; closed cells touch iff Chebyshev distance <= 1.
    std::vector<int> parent(x.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            long long cheb = 0;
            for (int a = 0; a < x.n; ++a)
                cheb = std::max(cheb, std::llabs(x.cells[i][a] - x.cells[j][a]));
            if (cheb <= 1) parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
        }
    std::map<int, std::pair<std::vector<long long>, std::vector<long long>>> bounds;
    for (std::size_t i = 0; i < x.size(); ++i) {
        int r = find(static_cast<int>(i));
        auto it = bounds.find(r);
        if (it == bounds.end()) {
            bounds[r] = {x.cells[i], x.cells[i]};
        } else {
            for (int a = 0; a < x.n; ++a) {
                it->second.first[a] = std::min(it->second.first[a], x.cells[i][a]);
                it->second.second[a] = std::max(it->second.second[a], x.cells[i][a]);
            }
        }
    }
    double sum = 0.0;
    for (const auto& [root, mm] : bounds) {
        long long extent = 0;
        for (int a = 0; a < x.n; ++a) extent = std::max(extent, mm.second[a] - mm.first[a] + 1);
        double rad = std::ldexp(static_cast<double>(extent), x.base_level - 1);
        sum += std::pow(rad, m);
    }
    return sum;
}

namespace {

LinfBall enclosing_ball(const LinfBall& a, const LinfBall& b) {
    DyBox ba = a.box(), bb = b.box();
    int nn = a.n();
    LinfBall out;
    out.center.resize(nn);
    Dyadic max_extent;
    std::vector<Dyadic> lo(nn), hi(nn);
    for (int i = 0; i < nn; ++i) {
        lo[i] = dy_min(ba[i].lo, bb[i].lo);
        hi[i] = dy_max(ba[i].hi, bb[i].hi);
        max_extent = dy_max(max_extent, hi[i] - lo[i]);
    }
    out.radius = max_extent.half();
    for (int i = 0; i < nn; ++i) out.center[i] = ((lo[i] + hi[i]).half());
    return out;
}

}  // namespace

double hc_small_m(std::vector<LinfBall> balls, double m) {
    if (!(m > 0.0 && m <= 1.0)) throw InputError("hc_small_m requires 0 < m <= 1");
    // Merge intersecting balls into the minimal enclosing ball until disjoint.
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < balls.size() && !merged; ++i)
            for (std::size_t j = i + 1; j < balls.size() && !merged; ++j) {
                if (box_intersects(balls[i].box(), balls[j].box())) {
                    LinfBall u = enclosing_ball(balls[i], balls[j]);
                    balls.erase(balls.begin() + static_cast<long>(j));
                    balls[i] = u;
                    merged = true;
                }
            }
    }
    double sum = 0.0;
    for (const auto& b : balls) sum += std::pow(b.radius.to_double(), m);
    return sum;
}

double BallCollection::weight(std::size_t j, double m) const {
    return std::pow(balls[j].radius.to_double(), m);
}

double BallCollection::total_weight(double m) const {
    double s = 0.0;
    for (std::size_t j = 0; j < balls.size(); ++j) s += weight(j, m);
    return s;
}

std::vector<Atom> atoms_from_points(const std::vector<std::vector<double>>& pts,
                                    const BallCollection& coll) {
    if (coll.size() > 32) throw CapacityError("collection mask limited to 32 balls");
    std::vector<DyBox> ball_boxes;
    ball_boxes.reserve(coll.size());
    for (const auto& b : coll.balls) ball_boxes.push_back(b.box());
    std::vector<Atom> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        Atom a;
        a.box = point_box(dpoint_from(p));
        for (std::size_t j = 0; j < coll.size(); ++j)
            if (box_contains(ball_boxes[j], a.box)) a.mask |= (1u << j);
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<Atom> atoms_from_voxels(const VoxelSet& x, const BallCollection& coll,
                                    std::size_t max_atoms) {
    if (coll.size() > 32) throw CapacityError("collection mask limited to 32 balls");
    std::vector<DyBox> ball_boxes;
    for (const auto& b : coll.balls) ball_boxes.push_back(b.box());
    std::vector<Atom> out;
    for (std::size_t ci = 0; ci < x.size(); ++ci) {
        DyBox cell = x.cell_cube(ci).box();
        // Cut coordinates per axis: ball facets strictly inside the cell.
        std::vector<std::vector<Dyadic>> cuts(x.n);
        for (int i = 0; i < x.n; ++i) {
            cuts[i].push_back(cell[i].lo);
            for (const auto& bb : ball_boxes) {
                for (const Dyadic& c : {bb[i].lo, bb[i].hi})
                    if (cell[i].lo < c && c < cell[i].hi) cuts[i].push_back(c);
            }
            cuts[i].push_back(cell[i].hi);
            std::sort(cuts[i].begin(), cuts[i].end(),
                      [](const Dyadic& a, const Dyadic& b) { return a < b; });
            cuts[i].erase(std::unique(cuts[i].begin(), cuts[i].end(),
                                      [](const Dyadic& a, const Dyadic& b) { return a == b; }),
                          cuts[i].end());
        }
        std::vector<std::size_t> idx(x.n, 0);
        while (true) {
            Atom a;
            a.box.resize(x.n);
            for (int i = 0; i < x.n; ++i) a.box[i] = {cuts[i][idx[i]], cuts[i][idx[i] + 1]};
            // The open atom crosses no ball facet, so midpoint membership is
            // containment of the whole atom.
            DyBox mid(x.n);
            for (int i = 0; i < x.n; ++i) {
                Dyadic c = (a.box[i].lo + a.box[i].hi).half();
                mid[i] = {c, c};
            }
            for (std::size_t j = 0; j < coll.size(); ++j)
                if (box_contains(ball_boxes[j], mid)) a.mask |= (1u << j);
            out.push_back(std::move(a));
            if (out.size() > max_atoms) throw CapacityError("atom refinement budget exceeded");
            int axis = 0;
            while (axis < x.n) {
                if (++idx[axis] + 1 < cuts[axis].size()) break;
                idx[axis] = 0;
                ++axis;
            }
            if (axis == x.n) break;
        }
    }
    return out;
}

namespace {

struct CoverSearch {
    const std::vector<std::uint32_t>& constraints;  // minimal atom masks
    const std::vector<double>& weights;
    std::size_t nballs;
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_mask = 0;

    void run(std::uint32_t chosen, double cost) {
        std::uint32_t pending = 0;
        bool any = false;
        // First uncovered constraint with the fewest options.
        int best_pc = 33;
        for (std::uint32_t c : constraints) {
            if (c & chosen) continue;
            any = true;
            int pc = std::popcount(c);
            if (pc < best_pc) {
                best_pc = pc;
                pending = c;
            }
        }
        if (!any) {
            if (cost < best) {
                best = cost;
                best_mask = chosen;
            }
            return;
        }
        // Admissible lower bound: the most expensive single uncovered
        // constraint still needs its cheapest ball.
        double lb = 0.0;
        for (std::uint32_t c : constraints) {
            if (c & chosen) continue;
            double mn = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < nballs; ++j)
                if (c >> j & 1u) mn = std::min(mn, weights[j]);
            lb = std::max(lb, mn);
        }
        if (cost + lb >= best) return;
        for (std::size_t j = 0; j < nballs; ++j) {
            if (!(pending >> j & 1u)) continue;
            run(chosen | (1u << j), cost + weights[j]);
        }
    }
};

}  // namespace

RestrictedContentResult restricted_content(const std::vector<Atom>& atoms,
                                           const BallCollection& coll, double m,
                                           std::size_t exact_threshold) {
    RestrictedContentResult res;
    if (atoms.empty()) return res;
    std::vector<std::uint32_t> masks;
    masks.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (a.mask == 0) throw InputError("restricted_content: set not covered by the collection");
        masks.push_back(a.mask);
    }
    std::sort(masks.begin(), masks.end());
    masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
    // Keep minimal masks only; a superset constraint is implied.
    std::vector<std::uint32_t> minimal;
    for (std::uint32_t a : masks) {
        bool dominated = false;
        for (std::uint32_t b : masks)
            if (b != a && (b & a) == b) {
                dominated = true;
                break;
            }
        if (!dominated) minimal.push_back(a);
    }
    std::vector<double> weights(coll.size());
    for (std::size_t j = 0; j < coll.size(); ++j) weights[j] = coll.weight(j, m);

    std::uint32_t chosen_mask = 0;
    if (coll.size() <= exact_threshold) {
        CoverSearch search{minimal, weights, coll.size()};
        search.run(0, 0.0);
        chosen_mask = search.best_mask;
        res.value = search.best;
        res.exact = true;
    } else {
        // Greedy cost-effectiveness: cheapest weight per newly covered constraint.
        std::vector<bool> covered(minimal.size(), false);
        std::size_t remaining = minimal.size();
        double cost = 0.0;
        while (remaining > 0) {
            std::size_t best_j = coll.size();
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < coll.size(); ++j) {
                if (chosen_mask >> j & 1u) continue;
                std::size_t gain = 0;
                for (std::size_t k = 0; k < minimal.size(); ++k)
                    if (!covered[k] && (minimal[k] >> j & 1u)) ++gain;
                if (gain == 0) continue;
                double ratio = weights[j] / static_cast<double>(gain);
                if (ratio < best_ratio) {
                    best_ratio = ratio;
                    best_j = j;
                }
            }
            if (best_j == coll.size())
                throw InputError("restricted_content: set not covered by the collection");
            chosen_mask |= (1u << best_j);
            cost += weights[best_j];
            for (std::size_t k = 0; k < minimal.size(); ++k)
                if (!covered[k] && (minimal[k] >> best_j & 1u)) {
                    covered[k] = true;
                    --remaining;
                }
        }
        res.value = cost;
        res.exact = false;
    }
    for (std::size_t j = 0; j < coll.size(); ++j)
        if (chosen_mask >> j & 1u) res.chosen.push_back(static_cast<int>(j));
    return res;
}

Dyadic atom_min_dist(const Atom& a, const DPoint& x) {
    return box_linf_distance(a.box, point_box(x));
}

Dyadic atom_max_dist(const Atom& a, const DPoint& x) {
    Dyadic d;
    for (std::size_t i = 0; i < x.size(); ++i) {
        Dyadic far = dy_max(abs(a.box[i].lo - x[i]), abs(a.box[i].hi - x[i]));
        d = dy_max(d, far);
    }
    return d;
}

CoareaResult coarea_search(const std::vector<Atom>& atoms, const BallCollection& coll, double m,
                           const std::vector<double>& center, double r1, double r2) {
    if (!(0.0 < r1 && r1 < r2)) throw InputError("coarea_search requires 0 < r1 < r2");
    DPoint x = dpoint_from(center);
    Dyadic d1 = Dyadic::from_double(r1), d2 = Dyadic::from_double(r2);

    std::vector<std::pair<Dyadic, Dyadic>> spans(atoms.size());
    std::vector<Atom> annulus_atoms;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        spans[i] = {atom_min_dist(atoms[i], x), atom_max_dist(atoms[i], x)};
        if (!(spans[i].second < d1) && !(d2 < spans[i].first)) annulus_atoms.push_back(atoms[i]);
    }
    double annulus = restricted_content(annulus_atoms, coll, m).value;
    double bound = 2.0 / (r2 - r1) * annulus;

    auto slice_at = [&](const Dyadic& r) {
        std::vector<Atom> slice;
        for (std::size_t i = 0; i < atoms.size(); ++i)
            if (!(r < spans[i].first) && !(spans[i].second < r)) slice.push_back(atoms[i]);
        return restricted_content(slice, coll, m).value;
    };

    // Candidate radii: critical values in (r1, r2), midpoints between
    // consecutive ones, and the interval midpoint; smallest qualifying wins.
    std::vector<Dyadic> crit;
    for (const auto& s : spans) {
        for (const Dyadic& v : {s.first, s.second})
            if (d1 < v && v < d2) crit.push_back(v);
    }
    for (const auto& b : coll.balls) {
        Atom tmp{b.box(), 0};
        for (const Dyadic& v : {atom_min_dist(tmp, x), atom_max_dist(tmp, x)})
            if (d1 < v && v < d2) crit.push_back(v);
    }
    std::sort(crit.begin(), crit.end(), [](const Dyadic& a, const Dyadic& b) { return a < b; });
    crit.erase(std::unique(crit.begin(), crit.end(),
                           [](const Dyadic& a, const Dyadic& b) { return a == b; }),
               crit.end());
    std::vector<Dyadic> candidates;
    {
        std::vector<Dyadic> fence;
        fence.push_back(d1);
        for (const auto& c : crit) fence.push_back(c);
        fence.push_back(d2);
        for (std::size_t i = 0; i + 1 < fence.size(); ++i)
            candidates.push_back((fence[i] + fence[i + 1]).half());
        for (const auto& c : crit) candidates.push_back(c);
        std::sort(candidates.begin(), candidates.end(),
                  [](const Dyadic& a, const Dyadic& b) { return a < b; });
    }
    for (const auto& r : candidates) {
        double sc = slice_at(r);
        if (sc <= bound) return {r.to_double(), sc, annulus, bound};
    }
    throw InvariantError("coarea_search: no radius satisfied the pigeonhole bound");
}

VoxelSet clip_to_cube(const VoxelSet& x, const DyadicCube& q) {
    if (q.level < x.base_level) throw InputError("clip_to_cube: cube below cell resolution");
    std::vector<std::vector<long long>> cells;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (q.contains(x.cell_cube(i))) cells.push_back(x.cells[i]);
    return VoxelSet::make(x.n, x.base_level, std::move(cells));
}

VoxelSet voxelize_cubes(const std::vector<DyadicCube>& cubes, std::size_t max_cells) {
    if (cubes.empty()) return VoxelSet{};
    int n = cubes.front().n();
    int lvl = cubes.front().level;
    for (const auto& c : cubes) lvl = std::min(lvl, c.level);
    std::vector<std::vector<long long>> cells;
    std::vector<long long> idx(n);
    for (const auto& c : cubes) {
        int s = c.level - lvl;
        if (s > 30) throw CapacityError("voxelize_cubes: level spread too large");
        long long side = 1LL << s;
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            std::vector<long long> cell(n);
            for (int i = 0; i < n; ++i) cell[i] = c.anchor[i] * side + idx[i];
            cells.push_back(std::move(cell));
            if (cells.size() > max_cells) throw CapacityError("voxelize_cubes: cell budget");
            int axis = 0;
            while (axis < n) {
                if (++idx[axis] < side) break;
                idx[axis] = 0;
                ++axis;
            }
            if (axis == n) break;
        }
    }
    return VoxelSet::make(n, lvl, std::move(cells));
}

}  // namespace hcbox
