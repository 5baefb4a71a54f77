#pragma once

#include <stdexcept>
#include <string>

namespace hycurv {

/// Failure categories used across the library. The CLI maps parse/config
/// failures to exit code 1 and solver failures to exit code 2.
enum class Errc {
    order_range,          // symmetric-function order outside [0, n]
    index_range,          // eigenvalue / node index out of range
    shape,                // non-symmetric or mis-sized matrix input
    domain,               // point outside an expression's / cap's domain, u <= 0
    admissibility,        // curvature vector left the Garding cone
    degenerate_domain,    // level set empty or without interior nodes
    grid_mismatch,        // fields on different grids
    dimension_mismatch,   // vector length disagreement in linear algebra
    zero_diagonal,        // Jacobi preconditioner hit a zero diagonal entry
    krylov_breakdown,     // BiCGSTAB rho ~ 0
    newton_nonconvergence,// damping floor reached before residual tolerance
    cone_exit,            // no damping keeps the iterate admissible
    continuation_failure, // homotopy step underflow
    parse_error,          // expression syntax / unknown identifier
    config_error,         // run configuration invalid
    io_error,             // file write failure
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Errc code() const noexcept { return code_; }

    // Optional diagnostics; negative / NaN when not applicable.
    int violated_order = -1;   // first j with sigma_j <= 0
    long node = -1;            // flattened grid node index
    double margin = 0.0;       // cone margin at the offending point
    long byte_offset = -1;     // position of a parse error

    Error& with_order(int j) { violated_order = j; return *this; }
    Error& with_node(long i) { node = i; return *this; }
    Error& with_margin(double m) { margin = m; return *this; }
    Error& with_offset(long off) { byte_offset = off; return *this; }

private:
    Errc code_;
};

} // namespace hycurv
