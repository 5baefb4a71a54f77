#pragma once

#include "hycurv/graph_geometry.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace hycurv {

/// Isotropic rectangular grid, n in {1,2,3}. Node order is row major with
/// the last axis fastest: index = ((c1*d2)+c2)*d3+c3.
struct Grid {
    int n = 0;
    SmallVec origin;
    double h = 0.0;
    std::array<int, 3> dims{1, 1, 1};

    long num_nodes() const {
        return static_cast<long>(dims[0]) * dims[1] * dims[2];
    }
    long stride(int axis) const {
        long s = 1;
        for (int a = axis + 1; a < n; ++a) s *= dims[static_cast<size_t>(a)];
        return s;
    }
    long index(const std::array<int, 3>& c) const {
        long idx = 0;
        for (int a = 0; a < n; ++a) idx = idx * dims[static_cast<size_t>(a)] + c[static_cast<size_t>(a)];
        return idx;
    }
    std::array<int, 3> coords(long idx) const {
        std::array<int, 3> c{0, 0, 0};
        for (int a = n - 1; a >= 0; --a) {
            c[static_cast<size_t>(a)] = static_cast<int>(idx % dims[static_cast<size_t>(a)]);
            idx /= dims[static_cast<size_t>(a)];
        }
        return c;
    }
    bool in_bounds(const std::array<int, 3>& c) const {
        for (int a = 0; a < n; ++a)
            if (c[static_cast<size_t>(a)] < 0 || c[static_cast<size_t>(a)] >= dims[static_cast<size_t>(a)]) return false;
        return true;
    }
    /// Coordinates of the (possibly out-of-range) lattice point c.
    SmallVec point(const std::array<int, 3>& c) const {
        SmallVec x(n);
        for (int a = 0; a < n; ++a) x[a] = origin[a] + h * c[static_cast<size_t>(a)];
        return x;
    }
    SmallVec point(long idx) const { return point(coords(idx)); }

    bool operator==(const Grid& o) const {
        return n == o.n && h == o.h && dims == o.dims &&
               origin.a == o.origin.a;
    }
};

enum class NodeClass : unsigned char { exterior = 0, cut = 1, interior = 2 };

const char* node_class_name(NodeClass c);

/// Dirichlet pin of one boundary-adjacent (CUT) node:
///   u_cut = boundary_value * const_coef + sum_a weight_a * u_anchor_a
/// built from linear interpolation along the grid segments that cross the
/// level set, averaged over the crossing directions with an INTERIOR node on
/// the opposite side. Weights plus const_coef sum to one, so a constant field
/// equal to the boundary value is reproduced exactly.
struct CutPin {
    long anchor;
    double weight;
};

struct CutNode {
    long node;
    std::array<double, 6> axis_fraction; // -x1,+x1,-x2,+x2,-x3,+x3; negative = no crossing
    double const_coef = 1.0;
    int pin_begin = 0;
    int pin_end = 0;
};

/// Node classification of a level-set domain {phi > 0} on a grid.
/// INTERIOR: inside with the whole 3^n-1 stencil box inside (unknowns).
/// CUT: inside but adjacent to the outside within the stencil box; these
/// nodes carry interpolated Dirichlet data rather than equations.
/// EXTERIOR: outside or undefined.
struct DomainMask {
    Grid grid;
    std::vector<NodeClass> cls;
    std::vector<long> interior;        // ascending node ids
    std::vector<CutNode> cuts;         // ascending node ids
    std::vector<CutPin> pins;
    std::vector<int32_t> compact;      // node -> id among INTERIOR u CUT, else -1
    std::vector<int32_t> cut_slot;     // node -> index into cuts, else -1
    long num_interior = 0;
    long num_cut = 0;

    NodeClass klass(long node) const { return cls[static_cast<size_t>(node)]; }
    long num_unknown_rows() const { return num_interior + num_cut; }
};

using MaskPtr = std::shared_ptr<const DomainMask>;
using LevelFn = std::function<double(const SmallVec&)>;

/// Grid-sampled scalar function; finite on INTERIOR u CUT, NaN elsewhere.
struct ScalarField {
    MaskPtr mask;
    std::vector<double> v;

    const Grid& grid() const { return mask->grid; }
    double operator[](long node) const { return v[static_cast<size_t>(node)]; }
    double& operator[](long node) { return v[static_cast<size_t>(node)]; }
};

/// Classify the domain {ubar > eps}. `ubar` may return NaN outside its
/// natural domain; such points count as outside. Crossing fractions come from
/// linear interpolation of ubar - eps along grid segments, falling back to
/// bisection when the far endpoint is undefined. Throws a degenerate-domain
/// error when no INTERIOR node exists.
DomainMask mask_from_levelset(const Grid& g, const LevelFn& ubar, double eps);

/// Same classification from a grid-sampled field (undefined nodes outside).
DomainMask mask_from_field(const ScalarField& f, double eps);

ScalarField make_field(MaskPtr mask);

/// Sample fn on INTERIOR u CUT nodes of the mask.
ScalarField sample_on_mask(MaskPtr mask, const LevelFn& fn);

/// Centered second-order jet at an INTERIOR node. Requires the node to be
/// INTERIOR (CUT and EXTERIOR nodes have no full stencil) and reads the
/// pinned CUT values where the stencil touches the boundary layer.
JetPoint fd_jet(const ScalarField& u, long node);

/// Unmasked variant for full-box scans: returns nothing unless the node and
/// its whole stencil box are in range with finite values.
std::optional<JetPoint> fd_jet_unmasked(const Grid& g, const std::vector<double>& values, long node);

/// Rewrite the CUT-node values so that the reconstructed trace on the level
/// set equals boundary_value (to second order in h for smooth fields).
void apply_dirichlet(ScalarField& field, double boundary_value);

struct CompareStats {
    double min_diff = 0.0;
    double max_diff = 0.0;
    long violations = 0;   // count of (a-b) < -tol
    long worst_node = -1;
};

/// Statistics of a - b over the INTERIOR nodes of `mask`.
CompareStats field_compare(const ScalarField& a, const ScalarField& b,
                           const DomainMask& mask, double tol);

/// CSV dump: header "x1,...,xn,value,mask", one row per node in node order.
void dump_csv(const ScalarField& f, std::ostream& os);

} // namespace hycurv
