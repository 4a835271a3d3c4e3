#include "hcbox/dyadic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace hcbox {

void Dyadic::normalize() {
    if (num == 0) {
        level = 0;
        return;
    }
    while ((num & 1LL) == 0) {
        num >>= 1;
        ++level;
    }
}

Dyadic Dyadic::from_double(double v) {
    if (!std::isfinite(v)) throw InputError("non-finite value is not a dyadic rational");
    if (v == 0.0) return Dyadic();
    int e = 0;
    double mant = std::frexp(v, &e);  // v = mant * 2^e, |mant| in [0.5, 1)
    auto num = static_cast<long long>(std::ldexp(mant, 53));
    return Dyadic(num, e - 53);
}

double Dyadic::to_double() const { return std::ldexp(static_cast<double>(num), level); }

std::string Dyadic::str() const {
    if (num == 0) return "0";
    if (level >= 0 && level < 30) return std::to_string(num << level);
    return std::to_string(num) + "*2^" + std::to_string(level);
}

namespace {

int bits_of(long long v) {
    auto u = static_cast<unsigned long long>(v < 0 ? -v : v);
    return static_cast<int>(std::bit_width(u));
}

long long checked_narrow(__int128 v) {
    if (v > static_cast<__int128>(INT64_MAX) || v < static_cast<__int128>(INT64_MIN))
        throw std::overflow_error("dyadic arithmetic overflow");
    return static_cast<long long>(v);
}

__int128 shifted(const Dyadic& a, int common_level) {
    int s = a.level - common_level;
    if (s > 100) throw std::overflow_error("dyadic level spread too large");
    return static_cast<__int128>(a.num) << s;
}

}  // namespace

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.num == 0) return b;
    if (b.num == 0) return a;
    int L = std::min(a.level, b.level);
    __int128 s = shifted(a, L) + shifted(b, L);
    if (s == 0) return Dyadic();
    while ((s & 1) == 0) {
        s >>= 1;
        ++L;
    }
    return Dyadic(checked_narrow(s), L);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    __int128 p = static_cast<__int128>(a.num) * b.num;
    long long n = checked_narrow(p);
    return Dyadic(n, a.level + b.level);
}

int compare(const Dyadic& a, const Dyadic& b) {
    int sa = a.sign(), sb = b.sign();
    if (sa != sb) return sa < sb ? -1 : 1;
    if (sa == 0) return 0;
    // Same nonzero sign: decide by magnitude exponent first so the residual
    // shift stays small enough for exact 128-bit comparison.
    int pa = a.level + bits_of(a.num);
    int pb = b.level + bits_of(b.num);
    if (pa != pb) return (pa < pb) == (sa > 0) ? -1 : 1;
    int L = std::min(a.level, b.level);
    __int128 va = shifted(a, L), vb = shifted(b, L);
    return va < vb ? -1 : (va > vb ? 1 : 0);
}

Dyadic abs(const Dyadic& a) { return a.num < 0 ? -a : a; }
Dyadic dy_min(const Dyadic& a, const Dyadic& b) { return a <= b ? a : b; }
Dyadic dy_max(const Dyadic& a, const Dyadic& b) { return a >= b ? a : b; }

long long floor_div_pow2(const Dyadic& x, int k) {
    if (x.num == 0) return 0;
    int s = x.level - k;
    if (s >= 0) {
        if (s > 62) throw std::overflow_error("floor_div_pow2 overflow");
        return checked_narrow(static_cast<__int128>(x.num) << s);
    }
    int shift = -s;
    if (shift > 62) return x.num < 0 ? -1 : 0;
    return x.num >> shift;  // arithmetic shift = floor division
}

DPoint dpoint_from(const std::vector<double>& p) {
    DPoint out;
    out.reserve(p.size());
    for (double v : p) out.push_back(Dyadic::from_double(v));
    return out;
}

DyBox point_box(const DPoint& p) {
    DyBox b(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) b[i] = {p[i], p[i]};
    return b;
}

bool box_intersects(const DyBox& a, const DyBox& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].hi < b[i].lo || b[i].hi < a[i].lo) return false;
    return true;
}

bool box_contains(const DyBox& outer, const DyBox& inner) {
    for (std::size_t i = 0; i < outer.size(); ++i)
        if (inner[i].lo < outer[i].lo || outer[i].hi < inner[i].hi) return false;
    return true;
}

bool box_equal(const DyBox& a, const DyBox& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].lo != b[i].lo || a[i].hi != b[i].hi) return false;
    return true;
}

bool meets_relint(const DyBox& whose, const DyBox& other) {
    for (std::size_t i = 0; i < whose.size(); ++i) {
        const auto& w = whose[i];
        const auto& o = other[i];
        if (w.lo == w.hi) {
            if (o.hi < w.lo || w.lo < o.lo) return false;
        } else {
            // Need overlap with the open interval (w.lo, w.hi).
            if (!(w.lo < o.hi && o.lo < w.hi)) return false;
        }
    }
    return true;
}

Dyadic box_linf_distance(const DyBox& a, const DyBox& b) {
    Dyadic d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        Dyadic gap;
        if (a[i].hi < b[i].lo)
            gap = b[i].lo - a[i].hi;
        else if (b[i].hi < a[i].lo)
            gap = a[i].lo - b[i].hi;
        d = dy_max(d, gap);
    }
    return d;
}

Dyadic linf_distance(const DyBox& a, const DyBox& b) { return box_linf_distance(a, b); }

DyBox DyadicCube::box() const {
    DyBox b(anchor.size());
    for (int i = 0; i < n(); ++i) b[i] = {lo(i), hi(i)};
    return b;
}

DyadicCube DyadicCube::parent() const {
    std::vector<long long> a(anchor.size());
    for (std::size_t i = 0; i < anchor.size(); ++i) a[i] = anchor[i] >> 1;
    return DyadicCube(level + 1, std::move(a));
}

DyadicCube DyadicCube::ancestor(int lvl) const {
    if (lvl < level) throw std::logic_error("ancestor level below cube level");
    int s = lvl - level;
    std::vector<long long> a(anchor.size());
    for (std::size_t i = 0; i < anchor.size(); ++i)
        a[i] = s > 62 ? (anchor[i] < 0 ? -1 : 0) : (anchor[i] >> s);
    return DyadicCube(lvl, std::move(a));
}

bool DyadicCube::contains(const DyadicCube& other) const {
    if (other.level > level) return false;
    return other.ancestor(level) == *this;
}

std::vector<DyadicCube> cube_children(const DyadicCube& q) {
    int d = q.n();
    std::vector<DyadicCube> out;
    out.reserve(1u << d);
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        std::vector<long long> a(q.anchor.size());
        for (int i = 0; i < d; ++i) a[i] = 2 * q.anchor[i] + ((mask >> i) & 1u);
        out.emplace_back(q.level - 1, std::move(a));
    }
    return out;
}

int DyadicFace::dim() const { return std::popcount(free_mask); }

Dyadic DyadicFace::size() const { return dim() == 0 ? Dyadic() : cube.size(); }

DyBox DyadicFace::box() const {
    DyBox b(cube.anchor.size());
    for (int i = 0; i < n(); ++i) {
        if (free_mask >> i & 1u)
            b[i] = {cube.lo(i), cube.hi(i)};
        else if (side_mask >> i & 1u)
            b[i] = {cube.hi(i), cube.hi(i)};
        else
            b[i] = {cube.lo(i), cube.lo(i)};
    }
    return b;
}

DyadicFace DyadicFace::canonical() const {
    DyadicFace f = *this;
    for (int i = 0; i < n(); ++i) {
        if (!(f.free_mask >> i & 1u) && (f.side_mask >> i & 1u)) {
            f.cube.anchor[i] += 1;
            f.side_mask &= ~(1u << i);
        }
    }
    return f;
}

bool operator==(const DyadicFace& a, const DyadicFace& b) {
    DyadicFace ca = a.canonical(), cb = b.canonical();
    return ca.cube == cb.cube && ca.free_mask == cb.free_mask;
}

bool face_less(const DyadicFace& a, const DyadicFace& b) {
    int c = compare(a.size(), b.size());
    if (c != 0) return c < 0;
    if (a.dim() != b.dim()) return a.dim() < b.dim();
    DyBox ba = a.box(), bb = b.box();
    for (std::size_t i = 0; i < ba.size(); ++i) {
        c = compare(ba[i].lo, bb[i].lo);
        if (c != 0) return c < 0;
        c = compare(ba[i].hi, bb[i].hi);
        if (c != 0) return c < 0;
    }
    return false;
}

std::vector<DyadicFace> enumerate_faces(const DyadicCube& q, int d) {
    int nn = q.n();
    if (d < 0 || d > nn) throw InputError("face dimension out of range");
    std::vector<DyadicFace> out;
    for (unsigned free = 0; free < (1u << nn); ++free) {
        if (std::popcount(free) != d) continue;
        unsigned fixed = ((1u << nn) - 1u) & ~free;
        // Iterate side assignments over the fixed axes.
        unsigned sub = 0;
        while (true) {
            out.emplace_back(q, free, sub);
            if (sub == fixed) break;
            sub = (sub - fixed) & fixed;
        }
    }
    return out;
}

std::vector<DyadicFace> face_facets(const DyadicFace& f) {
    std::vector<DyadicFace> out;
    for (int i = 0; i < f.n(); ++i) {
        if (!(f.free_mask >> i & 1u)) continue;
        for (unsigned side = 0; side <= 1; ++side) {
            DyadicFace g = f;
            g.free_mask &= ~(1u << i);
            if (side)
                g.side_mask |= (1u << i);
            else
                g.side_mask &= ~(1u << i);
            out.push_back(g.canonical());
        }
    }
    return out;
}

const char* face_rel_name(FaceRel r) {
    switch (r) {
        case FaceRel::covers: return "covers";
        case FaceRel::covered_by: return "covered_by";
        case FaceRel::equal: return "equal";
        case FaceRel::interior_overlap_smaller: return "interior_overlap_smaller";
        case FaceRel::boundary_touch: return "boundary_touch";
        case FaceRel::disjoint: return "disjoint";
    }
    return "?";
}

FaceRel face_relation(const DyadicFace& q, const DyadicFace& qp) {
    if (q.n() != qp.n()) throw InputError("face_relation: ambient dimensions differ");
    DyBox bq = q.box(), bp = qp.box();
    if (!box_intersects(bq, bp)) return FaceRel::disjoint;
    if (box_equal(bq, bp)) return FaceRel::equal;
    if (box_contains(bp, bq)) return FaceRel::covered_by;
    if (meets_relint(bq, bp)) {
        // qp meets relint(q) and does not cover q: qp must be strictly smaller.
        if (!(qp.size() < q.size()))
            throw InvariantError("dyadic face overlap without strict size drop");
        return FaceRel::interior_overlap_smaller;
    }
    if (box_contains(bq, bp)) return FaceRel::covers;
    return FaceRel::boundary_touch;
}

DyBox LinfBall::box() const {
    if (radius.sign() < 0) throw InputError("ball radius must be nonnegative");
    DyBox b(center.size());
    for (std::size_t i = 0; i < center.size(); ++i) b[i] = {center[i] - radius, center[i] + radius};
    return b;
}

VoxelSet VoxelSet::make(int n, int base_level, std::vector<std::vector<long long>> cells) {
    VoxelSet x;
    x.n = n;
    x.base_level = base_level;
    for (const auto& c : cells)
        if (static_cast<int>(c.size()) != n) throw InputError("cell arity mismatch");
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    x.cells = std::move(cells);
    return x;
}

bool VoxelSet::has_cell(const std::vector<long long>& a) const {
    return std::binary_search(cells.begin(), cells.end(), a);
}

}  // namespace hcbox
