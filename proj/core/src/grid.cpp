#include "hycurv/grid.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace hycurv {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct OffsetTable {
    // All nonzero offsets in {-1,0,1}^n, fixed enumeration order.
    std::vector<std::array<int, 3>> box;
};

OffsetTable make_offsets(int n) {
    OffsetTable t;
    const int lo[3] = {-1, -1, -1};
    for (int dx = lo[0]; dx <= 1; ++dx)
        for (int dy = (n >= 2 ? -1 : 0); dy <= (n >= 2 ? 1 : 0); ++dy)
            for (int dz = (n >= 3 ? -1 : 0); dz <= (n >= 3 ? 1 : 0); ++dz) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                t.box.push_back({dx, dy, dz});
            }
    return t;
}

bool inside_value(double v) { return std::isfinite(v) && v > 0.0; }

// Fraction in (0,1] along [x_in, x_out] where phi crosses zero.
// phi_in > 0; phi_out is <= 0 or NaN. Linear when both finite, bisection on
// the continuous function otherwise.
double crossing_fraction(const LevelFn* fn, const SmallVec& x_in, const SmallVec& x_out,
                         double phi_in, double phi_out, double eps) {
    if (std::isfinite(phi_out)) {
        const double denom = phi_in - phi_out;
        if (denom <= 0.0) return 1.0;
        return std::min(1.0, std::max(1e-12, phi_in / denom));
    }
    if (fn == nullptr) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        SmallVec xm(x_in.n);
        for (int a = 0; a < x_in.n; ++a) xm[a] = x_in[a] + mid * (x_out[a] - x_in[a]);
        const double vm = (*fn)(xm) - eps;
        if (inside_value(vm))
            lo = mid;
        else
            hi = mid;
    }
    return std::max(1e-12, 0.5 * (lo + hi));
}

DomainMask build_mask(const Grid& g, const std::vector<double>& phi, const LevelFn* fn, double eps) {
    const long nn = g.num_nodes();
    DomainMask m;
    m.grid = g;
    m.cls.assign(static_cast<size_t>(nn), NodeClass::exterior);
    m.compact.assign(static_cast<size_t>(nn), -1);
    m.cut_slot.assign(static_cast<size_t>(nn), -1);

    const OffsetTable offs = make_offsets(g.n);

    std::vector<char> inside(static_cast<size_t>(nn), 0);
    for (long i = 0; i < nn; ++i) inside[static_cast<size_t>(i)] = inside_value(phi[static_cast<size_t>(i)]) ? 1 : 0;

    auto neighbor_inside = [&](const std::array<int, 3>& c, const std::array<int, 3>& d) {
        std::array<int, 3> nb{c[0] + d[0], c[1] + d[1], c[2] + d[2]};
        if (!g.in_bounds(nb)) return false; // out of grid counts as outside
        return inside[static_cast<size_t>(g.index(nb))] != 0;
    };

    // Classify.
    for (long i = 0; i < nn; ++i) {
        if (!inside[static_cast<size_t>(i)]) continue;
        const auto c = g.coords(i);
        bool full = true;
        for (const auto& d : offs.box) {
            if (!neighbor_inside(c, d)) {
                full = false;
                break;
            }
        }
        m.cls[static_cast<size_t>(i)] = full ? NodeClass::interior : NodeClass::cut;
    }

    // Compact numbering in node order, interior list, cut records.
    int32_t next = 0;
    for (long i = 0; i < nn; ++i) {
        const NodeClass k = m.cls[static_cast<size_t>(i)];
        if (k == NodeClass::exterior) continue;
        m.compact[static_cast<size_t>(i)] = next++;
        if (k == NodeClass::interior) m.interior.push_back(i);
    }
    m.num_interior = static_cast<long>(m.interior.size());
    if (m.num_interior == 0)
        throw Error(Errc::degenerate_domain,
                    "mask_from_levelset: level set has no interior nodes at eps = " +
                        std::to_string(eps));

    // Pins for CUT nodes.
    for (long i = 0; i < nn; ++i) {
        if (m.cls[static_cast<size_t>(i)] != NodeClass::cut) continue;
        CutNode cn;
        cn.node = i;
        cn.axis_fraction.fill(-1.0);
        cn.pin_begin = static_cast<int>(m.pins.size());
        const auto c = g.coords(i);
        const SmallVec xi = g.point(c);

        // One candidate per crossing direction: interpolate the cut value
        // from the boundary value at the crossing (distance theta*h outward)
        // and one or two interior anchors on the opposite ray. The quadratic
        // rule keeps the pinning error at O(h^3), so the kink it leaves in
        // the neighboring second differences vanishes under refinement; it
        // degrades to linear where the second anchor is missing.
        struct Candidate {
            long anchor1;
            long anchor2; // -1 for the linear rule
            double w_eps, w1, w2;
        };
        std::vector<Candidate> cands;
        for (const auto& d : offs.box) {
            std::array<int, 3> nb{c[0] + d[0], c[1] + d[1], c[2] + d[2]};
            const bool nb_in = g.in_bounds(nb) && inside[static_cast<size_t>(g.index(nb))];
            if (nb_in) continue; // not a crossing direction
            double phi_out = kNan;
            if (g.in_bounds(nb)) phi_out = phi[static_cast<size_t>(g.index(nb))];
            const SmallVec xo = g.point(nb);
            const double theta =
                crossing_fraction(fn, xi, xo, phi[static_cast<size_t>(i)], phi_out, eps);

            // Record per-axis fractions for single-axis crossing directions.
            int axis = -1, sign = 0, nzero = 0;
            for (int a = 0; a < g.n; ++a)
                if (d[static_cast<size_t>(a)] != 0) {
                    ++nzero;
                    axis = a;
                    sign = d[static_cast<size_t>(a)];
                }
            if (nzero == 1)
                cn.axis_fraction[static_cast<size_t>(2 * axis + (sign > 0 ? 1 : 0))] = theta;

            std::array<int, 3> op1{c[0] - d[0], c[1] - d[1], c[2] - d[2]};
            if (!g.in_bounds(op1)) continue;
            const long anchor1 = g.index(op1);
            if (m.cls[static_cast<size_t>(anchor1)] != NodeClass::interior) continue;

            std::array<int, 3> op2{c[0] - 2 * d[0], c[1] - 2 * d[1], c[2] - 2 * d[2]};
            long anchor2 = -1;
            if (g.in_bounds(op2) &&
                m.cls[static_cast<size_t>(g.index(op2))] == NodeClass::interior)
                anchor2 = g.index(op2);

            Candidate cd;
            cd.anchor1 = anchor1;
            cd.anchor2 = anchor2;
            if (anchor2 >= 0) {
                // Lagrange weights at the cut node for samples at the
                // crossing (+theta h) and the anchors (-h, -2h).
                cd.w_eps = 2.0 / ((1.0 + theta) * (2.0 + theta));
                cd.w1 = 2.0 * theta / (1.0 + theta);
                cd.w2 = -theta / (2.0 + theta);
            } else {
                cd.w_eps = 1.0 / (1.0 + theta);
                cd.w1 = theta / (1.0 + theta);
                cd.w2 = 0.0;
            }
            cands.push_back(cd);
        }

        if (cands.empty()) {
            cn.const_coef = 1.0; // pinned to the boundary value itself
        } else {
            const double inv_m = 1.0 / static_cast<double>(cands.size());
            double cc = 0.0;
            for (const auto& cd : cands) {
                cc += cd.w_eps * inv_m;
                m.pins.push_back({cd.anchor1, cd.w1 * inv_m});
                if (cd.anchor2 >= 0) m.pins.push_back({cd.anchor2, cd.w2 * inv_m});
            }
            cn.const_coef = cc;
        }
        cn.pin_end = static_cast<int>(m.pins.size());
        m.cut_slot[static_cast<size_t>(i)] = static_cast<int32_t>(m.cuts.size());
        m.cuts.push_back(cn);
    }
    m.num_cut = static_cast<long>(m.cuts.size());
    return m;
}

} // namespace

const char* node_class_name(NodeClass c) {
    switch (c) {
        case NodeClass::exterior: return "exterior";
        case NodeClass::cut: return "cut";
        case NodeClass::interior: return "interior";
    }
    return "?";
}

DomainMask mask_from_levelset(const Grid& g, const LevelFn& ubar, double eps) {
    if (!(eps > 0.0))
        throw Error(Errc::config_error, "mask_from_levelset: eps must be positive");
    const long nn = g.num_nodes();
    std::vector<double> phi(static_cast<size_t>(nn), kNan);
    for (long i = 0; i < nn; ++i) {
        const double v = ubar(g.point(i));
        phi[static_cast<size_t>(i)] = std::isfinite(v) ? v - eps : kNan;
    }
    return build_mask(g, phi, &ubar, eps);
}

DomainMask mask_from_field(const ScalarField& f, double eps) {
    const Grid& g = f.grid();
    const long nn = g.num_nodes();
    std::vector<double> phi(static_cast<size_t>(nn), kNan);
    for (long i = 0; i < nn; ++i) {
        const double v = f[i];
        phi[static_cast<size_t>(i)] = std::isfinite(v) ? v - eps : kNan;
    }
    return build_mask(g, phi, nullptr, eps);
}

ScalarField make_field(MaskPtr mask) {
    ScalarField f;
    f.v.assign(static_cast<size_t>(mask->grid.num_nodes()), kNan);
    f.mask = std::move(mask);
    return f;
}

ScalarField sample_on_mask(MaskPtr mask, const LevelFn& fn) {
    ScalarField f = make_field(mask);
    const Grid& g = f.grid();
    for (long i = 0; i < g.num_nodes(); ++i) {
        if (f.mask->klass(i) == NodeClass::exterior) continue;
        f[i] = fn(g.point(i));
    }
    return f;
}

JetPoint fd_jet(const ScalarField& u, long node) {
    const DomainMask& m = *u.mask;
    const Grid& g = m.grid;
    if (node < 0 || node >= g.num_nodes())
        throw Error(Errc::index_range, "fd_jet: node out of range").with_node(node);
    const NodeClass k = m.klass(node);
    if (k != NodeClass::interior)
        throw Error(Errc::domain,
                    std::string("fd_jet: node is ") + node_class_name(k) + ", not interior")
            .with_node(node);

    const int n = g.n;
    const double h = g.h;
    JetPoint p;
    p.u = u[node];
    p.du = SmallVec(n);
    p.d2u = SmallMat(n);

    long str[3] = {0, 0, 0};
    for (int a = 0; a < n; ++a) str[a] = g.stride(a);

    const double inv2h = 1.0 / (2.0 * h);
    const double invh2 = 1.0 / (h * h);
    for (int a = 0; a < n; ++a) {
        const double up = u[node + str[a]];
        const double um = u[node - str[a]];
        p.du[a] = (up - um) * inv2h;
        p.d2u(a, a) = (up - 2.0 * p.u + um) * invh2;
    }
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double vpp = u[node + str[a] + str[b]];
            const double vmm = u[node - str[a] - str[b]];
            const double vpm = u[node + str[a] - str[b]];
            const double vmp = u[node - str[a] + str[b]];
            const double mixed = (vpp + vmm - vpm - vmp) * 0.25 * invh2;
            p.d2u(a, b) = mixed;
            p.d2u(b, a) = mixed;
        }
    return p;
}

std::optional<JetPoint> fd_jet_unmasked(const Grid& g, const std::vector<double>& values, long node) {
    const int n = g.n;
    const auto c = g.coords(node);
    for (int a = 0; a < n; ++a)
        if (c[static_cast<size_t>(a)] < 1 || c[static_cast<size_t>(a)] > g.dims[static_cast<size_t>(a)] - 2)
            return std::nullopt;
    long str[3] = {0, 0, 0};
    for (int a = 0; a < n; ++a) str[a] = g.stride(a);

    // All box values must be finite.
    for (int dx = -1; dx <= 1; ++dx)
        for (int dy = (n >= 2 ? -1 : 0); dy <= (n >= 2 ? 1 : 0); ++dy)
            for (int dz = (n >= 3 ? -1 : 0); dz <= (n >= 3 ? 1 : 0); ++dz) {
                const long idx = node + dx * str[0] + dy * (n >= 2 ? str[1] : 0) +
                                 dz * (n >= 3 ? str[2] : 0);
                if (!std::isfinite(values[static_cast<size_t>(idx)])) return std::nullopt;
            }

    JetPoint p;
    p.u = values[static_cast<size_t>(node)];
    p.du = SmallVec(n);
    p.d2u = SmallMat(n);
    const double inv2h = 1.0 / (2.0 * g.h);
    const double invh2 = 1.0 / (g.h * g.h);
    for (int a = 0; a < n; ++a) {
        const double up = values[static_cast<size_t>(node + str[a])];
        const double um = values[static_cast<size_t>(node - str[a])];
        p.du[a] = (up - um) * inv2h;
        p.d2u(a, a) = (up - 2.0 * p.u + um) * invh2;
    }
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double vpp = values[static_cast<size_t>(node + str[a] + str[b])];
            const double vmm = values[static_cast<size_t>(node - str[a] - str[b])];
            const double vpm = values[static_cast<size_t>(node + str[a] - str[b])];
            const double vmp = values[static_cast<size_t>(node - str[a] + str[b])];
            const double mixed = (vpp + vmm - vpm - vmp) * 0.25 * invh2;
            p.d2u(a, b) = mixed;
            p.d2u(b, a) = mixed;
        }
    return p;
}

void apply_dirichlet(ScalarField& field, double boundary_value) {
    const DomainMask& m = *field.mask;
    for (const CutNode& cn : m.cuts) {
        double v = boundary_value * cn.const_coef;
        for (int p = cn.pin_begin; p < cn.pin_end; ++p)
            v += m.pins[static_cast<size_t>(p)].weight * field[m.pins[static_cast<size_t>(p)].anchor];
        field[cn.node] = v;
    }
}

CompareStats field_compare(const ScalarField& a, const ScalarField& b,
                           const DomainMask& mask, double tol) {
    if (!(a.grid() == b.grid()) || !(a.grid() == mask.grid))
        throw Error(Errc::grid_mismatch, "field_compare: fields on different grids");
    CompareStats st;
    bool first = true;
    for (long node : mask.interior) {
        const double d = a[node] - b[node];
        if (!std::isfinite(d))
            throw Error(Errc::domain, "field_compare: non-finite value at interior node")
                .with_node(node);
        if (first) {
            st.min_diff = st.max_diff = d;
            st.worst_node = node;
            first = false;
        } else {
            if (d < st.min_diff) {
                st.min_diff = d;
                st.worst_node = node;
            }
            st.max_diff = std::max(st.max_diff, d);
        }
        if (d < -tol) ++st.violations;
    }
    return st;
}

void dump_csv(const ScalarField& f, std::ostream& os) {
    const Grid& g = f.grid();
    for (int a = 0; a < g.n; ++a) os << "x" << (a + 1) << ",";
    os << "value,mask\n";
    char buf[64];
    for (long i = 0; i < g.num_nodes(); ++i) {
        const SmallVec x = g.point(i);
        for (int a = 0; a < g.n; ++a) {
            snprintf(buf, sizeof buf, "%.17g", x[a]);
            os << buf << ",";
        }
        snprintf(buf, sizeof buf, "%.17g", f[i]);
        os << buf << "," << node_class_name(f.mask->klass(i)) << "\n";
    }
}

} // namespace hycurv
