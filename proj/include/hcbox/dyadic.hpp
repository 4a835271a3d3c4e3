#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hcbox {

// Errors surfaced to the CLI with distinct exit codes.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : InputError {
    using InputError::InputError;
};
struct CapacityError : InputError {
    using InputError::InputError;
};
// A proven property failed at runtime; indicates a bug, not bad input.
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact dyadic rational: value = num * 2^level, canonical form has num odd or zero.
// All geometry predicates run on these; floating point is confined to content values.
struct Dyadic {
    long long num = 0;
    int level = 0;

    Dyadic() = default;
    Dyadic(long long numerator, int lvl) : num(numerator), level(lvl) { normalize(); }

    static Dyadic of(long long k) { return Dyadic(k, 0); }
    // Every finite double is a dyadic rational; the conversion is exact.
    static Dyadic from_double(double v);

    void normalize();
    bool is_zero() const { return num == 0; }
    int sign() const { return num > 0 ? 1 : (num < 0 ? -1 : 0); }
    double to_double() const;
    Dyadic half() const { return Dyadic(num, level - 1); }
    std::string str() const;

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
    friend Dyadic operator-(const Dyadic& a) { return Dyadic(-a.num, a.level); }
    friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
};

int compare(const Dyadic& a, const Dyadic& b);
inline bool operator==(const Dyadic& a, const Dyadic& b) { return compare(a, b) == 0; }
inline bool operator!=(const Dyadic& a, const Dyadic& b) { return compare(a, b) != 0; }
inline bool operator<(const Dyadic& a, const Dyadic& b) { return compare(a, b) < 0; }
inline bool operator<=(const Dyadic& a, const Dyadic& b) { return compare(a, b) <= 0; }
inline bool operator>(const Dyadic& a, const Dyadic& b) { return compare(a, b) > 0; }
inline bool operator>=(const Dyadic& a, const Dyadic& b) { return compare(a, b) >= 0; }
Dyadic abs(const Dyadic& a);
Dyadic dy_min(const Dyadic& a, const Dyadic& b);
Dyadic dy_max(const Dyadic& a, const Dyadic& b);
// floor(x / 2^k) as an integer; exact for any sign.
long long floor_div_pow2(const Dyadic& x, int k);

// Exact point with dyadic coordinates.
using DPoint = std::vector<Dyadic>;
DPoint dpoint_from(const std::vector<double>& p);

// Closed axis-aligned box with dyadic corners; intervals may be degenerate.
// Cubes, faces and l_inf balls all reduce to this for exact predicates.
struct DyInterval {
    Dyadic lo, hi;
};
using DyBox = std::vector<DyInterval>;

DyBox point_box(const DPoint& p);
bool box_intersects(const DyBox& a, const DyBox& b);
bool box_contains(const DyBox& outer, const DyBox& inner);
bool box_equal(const DyBox& a, const DyBox& b);
// other ∩ relint(whose) != empty. relint of a degenerate interval is the point itself.
bool meets_relint(const DyBox& whose, const DyBox& other);
Dyadic box_linf_distance(const DyBox& a, const DyBox& b);

// Dyadic cube: product of [anchor_i * 2^level, (anchor_i+1) * 2^level].
// Size (= l_inf diameter = side) is 2^level. Any two dyadic cubes are nested
// or have disjoint interiors.
struct DyadicCube {
    int level = 0;
    std::vector<long long> anchor;

    DyadicCube() = default;
    DyadicCube(int lvl, std::vector<long long> a) : level(lvl), anchor(std::move(a)) {}

    int n() const { return static_cast<int>(anchor.size()); }
    Dyadic size() const { return Dyadic(1, level); }
    Dyadic lo(int i) const { return Dyadic(anchor[i], level); }
    Dyadic hi(int i) const { return Dyadic(anchor[i] + 1, level); }
    DyBox box() const;
    DyadicCube parent() const;
    // Ancestor at the given coarser level (>= this->level).
    DyadicCube ancestor(int lvl) const;
    bool contains(const DyadicCube& other) const;

    friend bool operator==(const DyadicCube& a, const DyadicCube& b) {
        return a.level == b.level && a.anchor == b.anchor;
    }
    friend bool operator<(const DyadicCube& a, const DyadicCube& b) {
        if (a.level != b.level) return a.level < b.level;
        return a.anchor < b.anchor;
    }
};

// 2^n subcubes at level-1 whose union is Q.
std::vector<DyadicCube> cube_children(const DyadicCube& q);

// Closed face of a dyadic cube. Free axes span the cube's full interval;
// each fixed axis sits at the lower (bit 0) or upper (bit 1) end.
// Canonical form uses side bit 0 everywhere so equal point sets compare equal.
struct DyadicFace {
    DyadicCube cube;
    unsigned free_mask = 0;
    unsigned side_mask = 0;

    DyadicFace() = default;
    DyadicFace(DyadicCube c, unsigned free, unsigned side)
        : cube(std::move(c)), free_mask(free), side_mask(side) {}
    static DyadicFace full(DyadicCube c) {
        unsigned all = (1u << c.n()) - 1u;
        return DyadicFace(std::move(c), all, 0);
    }

    int n() const { return cube.n(); }
    int dim() const;
    // Diameter convention: 2^level for dim >= 1, zero for vertices.
    Dyadic size() const;
    DyBox box() const;
    DyadicFace canonical() const;

    friend bool operator==(const DyadicFace& a, const DyadicFace& b);
};

// Deterministic total order on faces: (size, dim, box lexicographic).
bool face_less(const DyadicFace& a, const DyadicFace& b);

// All d-dimensional faces of Q; count = 2^(n-d) * binom(n,d).
std::vector<DyadicFace> enumerate_faces(const DyadicCube& q, int d);
// (dim-1)-faces of a face, within its own span.
std::vector<DyadicFace> face_facets(const DyadicFace& f);

enum class FaceRel { covers, covered_by, equal, interior_overlap_smaller, boundary_touch, disjoint };
const char* face_rel_name(FaceRel r);

// Classification of a face pair. interior_overlap_smaller means qp meets the
// relative interior of q without covering q; in that case size(qp) < size(q)
// always holds and is asserted (dyadic nesting makes other outcomes impossible).
FaceRel face_relation(const DyadicFace& q, const DyadicFace& qp);

// Closed l_inf ball: a cube with sides parallel to the axes. Diameter = 2*radius.
struct LinfBall {
    DPoint center;
    Dyadic radius;

    int n() const { return static_cast<int>(center.size()); }
    DyBox box() const;
};

// Exact l_inf distance between closed sets given as boxes; 0 iff they intersect.
Dyadic linf_distance(const DyBox& a, const DyBox& b);

// Compact set as a finite union of closed base-level dyadic cells.
struct VoxelSet {
    int n = 0;
    int base_level = 0;
    std::vector<std::vector<long long>> cells;  // sorted, unique

    static VoxelSet make(int n, int base_level, std::vector<std::vector<long long>> cells);
    bool empty() const { return cells.empty(); }
    std::size_t size() const { return cells.size(); }
    DyadicCube cell_cube(std::size_t i) const { return DyadicCube(base_level, cells[i]); }
    bool has_cell(const std::vector<long long>& a) const;
};

}  // namespace hcbox
