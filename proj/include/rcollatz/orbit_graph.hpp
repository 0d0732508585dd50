#pragma once

// Finite windows of the digit graphs: row n holds the balanced ternary digits of
// (3/2)^n x, and (n, v) points to (n + 1, v) when [(3/2)^n x / 3^v] is odd and to
// (n + 1, v + 1) otherwise. The G graph keeps only non-zero labels.

#include <rcollatz/interval.hpp>
#include <rcollatz/ternary_dyadic.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rcollatz {

enum class Label : std::int8_t { Minus = -1, Zero = 0, Plus = 1, Unknown = 2 };

char to_char(Label l) noexcept;
inline bool is_nonzero(Label l) noexcept { return l == Label::Plus || l == Label::Minus; }

/// Row-major order: rows ascending, columns left to right (z descending).
struct GridNode {
    std::int64_t n = 0;
    std::int64_t z = 0;

    friend bool operator==(const GridNode&, const GridNode&) = default;
    friend std::strong_ordering operator<=>(const GridNode& a, const GridNode& b) {
        if (auto c = a.n <=> b.n; c != 0) {
            return c;
        }
        return b.z <=> a.z;
    }
    std::string name() const { return std::to_string(n) + "_" + std::to_string(z); }
};

struct GridEdge {
    GridNode from;
    GridNode to;
    friend bool operator==(const GridEdge&, const GridEdge&) = default;
};

struct RowInfo {
    std::vector<Label> labels;                 // z_hi down to z_lo
    std::vector<std::optional<bool>> tail_odd; // parity of [y / 3^z], empty when undetermined
    std::optional<BigInt> above;               // [y / 3^(z_hi + 1)]
};

class OrbitGraphWindow {
public:
    std::int64_t n0 = 0;
    std::int64_t n1 = -1;
    std::int64_t z_hi = 0;
    std::int64_t z_lo = 0;
    std::vector<RowInfo> rows;       // n0..n1
    RowInfo before;                  // row n0 - 1, used for leaf tests of the top row
    std::vector<GridEdge> edges;     // H edges whose source row is in the window
    std::vector<GridNode> undetermined;

    bool empty() const noexcept { return n1 < n0 || z_hi < z_lo; }
    std::int64_t row_count() const noexcept { return n1 < n0 ? 0 : n1 - n0 + 1; }
    std::int64_t col_count() const noexcept { return z_hi - z_lo + 1; }
    bool in_window(const GridNode& v) const noexcept {
        return v.n >= n0 && v.n <= n1 && v.z <= z_hi && v.z >= z_lo;
    }
    Label label(const GridNode& v) const;
    /// Test hook for negative controls; edges are left untouched.
    void set_label(const GridNode& v, Label l);

    /// Non-zero labelled cells, row-major.
    std::vector<GridNode> g_nodes() const;
    /// Edges with both endpoints in the window and non-zero labels.
    std::vector<GridEdge> g_edges() const;
    /// Digits of row n as text, '.' after position 0, 'U' for unknown cells.
    std::string row_string(std::int64_t n) const;
};

/// Exact window for x; rows may be negative.
OrbitGraphWindow build_window(const TernaryDyadic& x, std::pair<std::int64_t, std::int64_t> rows,
                              std::pair<std::int64_t, std::int64_t> cols);
/// Window for a digit-prefix real. Cells whose digit is not fixed by the prefix
/// get Label::Unknown and are listed in `undetermined`. Negative rows are refused.
OrbitGraphWindow build_window(const DigitStreamReal& x, std::pair<std::int64_t, std::int64_t> rows,
                              std::pair<std::int64_t, std::int64_t> cols);
/// Throws PrecisionExhausted listing the undetermined cells, if any.
void require_determined(const OrbitGraphWindow& w);

struct Violation {
    GridNode at;
    std::string detail;
};

std::vector<Violation> check_nonzero_propagation(const OrbitGraphWindow& w);
/// a(n+1,z+1) = -a(n,z) + a(n+1,z) + a(n,z-1) a(n+1,z) (a(n+1,z) + a(n,z-1)) mod 3
std::vector<Violation> check_recurrence(const OrbitGraphWindow& w);
/// Compares the stored tail parities with the parity of the non-zero digit count
/// at positions >= v (window digits plus the expansion of the part above it).
std::vector<Violation> check_edge_rule(const OrbitGraphWindow& w);

struct ComponentLabeling {
    std::int64_t count = 0;
    std::map<GridNode, std::int64_t> id; // window-relative; ids follow the smallest node
};

ComponentLabeling components(const OrbitGraphWindow& w);

struct BranchPath {
    std::vector<GridNode> nodes;
};

/// Per row i with leftmost non-zero column j_i: k_i = j_i - 1 when (i, j_i) has no
/// incoming G edge from row i - 1, else k_i = j_i.
BranchPath leftmost_branch(const OrbitGraphWindow& w);

enum class GraphFormat { Dot, Json };
std::string export_graph(const OrbitGraphWindow& w, GraphFormat format);

struct PatternShift {
    std::int64_t dn = 0;
    std::int64_t dz = 0;
};

/// Searches y's graph for the labels of `pattern`, shifted by dn in [row_shift.first,
/// row_shift.second] and dz in [col_shift.first, col_shift.second]. First hit in
/// (dn, then dz ascending) order.
std::optional<PatternShift> find_pattern(const OrbitGraphWindow& pattern, const TernaryDyadic& y,
                                         std::pair<std::int64_t, std::int64_t> row_shift,
                                         std::pair<std::int64_t, std::int64_t> col_shift);

} // namespace rcollatz
