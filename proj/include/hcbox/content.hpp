#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hcbox/dyadic.hpp"

namespace hcbox {

struct ContentParams {
    double m = 1.0;
    int n = 0;
};

// (size/2)^m for a dyadic cube of the given level.
double cube_cost(int level, double m);

struct ContentResult {
    double value = 0.0;
    std::vector<DyadicCube> witness;  // optimal cover achieving value
};

// Exact minimum of sum (size_i/2)^m over covers of X by dyadic cubes at levels
// >= X.base_level, by bottom-up DP on the dyadic tree. Cells are the atoms of X,
// so cubes below the cell resolution never enter; for m <= n this coincides with
// the unrestricted dyadic content (subdividing a cube multiplies cost by 2^(n-m) >= 1).
ContentResult hc_dyadic(const VoxelSet& x, const ContentParams& p);
double hc_dyadic_value(const VoxelSet& x, const ContentParams& p);

// Exhaustive set-cover oracle over all dyadic cubes up to max_level meeting X.
// Exact on its domain; equals hc_dyadic when max_level reaches the optimum's levels.
double hc_dyadic_bruteforce(const VoxelSet& x, const ContentParams& p, int max_level);

// Certified interval containing the true l_inf Hausdorff content:
// upper = hc_dyadic(X), lower = upper / (4^n * 2^m).
std::pair<double, double> hc_sandwich(const VoxelSet& x, const ContentParams& p);

// Cover an l_inf ball by dyadic cubes: per axis, find the smallest spacing d_i
// with exactly one lattice vertex in the projection, then tile every projection
// at the minimum spacing. Count <= 4^n, every cube size <= 2 * diameter,
// containment exact. A ball that is itself a dyadic cube maps to that cube.
std::vector<DyadicCube> cover_ball_dyadic(const LinfBall& ball);

// Sum over connected components of rad(C)^m, for 0 < m <= 1.
// VoxelSet connectivity via closed-cell adjacency (face or corner touch);
// the ball variant merges intersecting balls into minimal enclosing balls
// until pairwise disjoint.
double hc_small_m(const VoxelSet& x, double m);
double hc_small_m(std::vector<LinfBall> balls, double m);

// Fixed near-optimal ball family {beta_j} underlying the restricted content.
struct BallCollection {
    std::vector<LinfBall> balls;

    std::size_t size() const { return balls.size(); }
    double weight(std::size_t j, double m) const;  // r_j^m
    double total_weight(double m) const;
};

// A piece of the queried set that is entirely inside or outside every
// collection ball; mask bit j set iff the atom lies inside ball j.
struct Atom {
    DyBox box;
    std::uint32_t mask = 0;
};

std::vector<Atom> atoms_from_points(const std::vector<std::vector<double>>& pts,
                                    const BallCollection& coll);
// Refine the cells of X along every ball facet so each atom is in/out of each
// ball; throws CapacityError beyond max_atoms.
std::vector<Atom> atoms_from_voxels(const VoxelSet& x, const BallCollection& coll,
                                    std::size_t max_atoms = 1u << 20);

struct RestrictedContentResult {
    double value = 0.0;
    std::vector<int> chosen;
    bool exact = true;
};

// Minimum of sum r_j^m over subcollections covering every atom. Exact
// branch-and-bound for |coll| <= exact_threshold, greedy upper bound above.
RestrictedContentResult restricted_content(const std::vector<Atom>& atoms,
                                           const BallCollection& coll, double m,
                                           std::size_t exact_threshold = 20);

struct CoareaResult {
    double radius = 0.0;
    double slice_content = 0.0;
    double annulus_content = 0.0;
    double bound = 0.0;
};

// Find r in (r1, r2) with rc(X ∩ S(x,r)) <= 2/(r2-r1) * rc(X ∩ A(x,r1,r2)),
// scanning the critical radii where the sphere's atom set changes. Existence
// is a pigeonhole fact; violation raises InvariantError.
CoareaResult coarea_search(const std::vector<Atom>& atoms, const BallCollection& coll,
                           double m, const std::vector<double>& center, double r1, double r2);

// Smallest atom/sphere incidence radii, used by coarea and the good-ball search.
Dyadic atom_min_dist(const Atom& a, const DPoint& x);
Dyadic atom_max_dist(const Atom& a, const DPoint& x);

// Cells of X inside Q (cells are never split: requires Q.level >= X.base_level).
VoxelSet clip_to_cube(const VoxelSet& x, const DyadicCube& q);
// Union of dyadic cubes as a VoxelSet at the finest member level.
VoxelSet voxelize_cubes(const std::vector<DyadicCube>& cubes, std::size_t max_cells = 1u << 22);

}  // namespace hcbox
