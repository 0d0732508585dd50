#include <rcollatz/orbit_graph.hpp>

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>

namespace rcollatz {

namespace {

Rational pow3_inverse(std::int64_t z) {
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), 3, static_cast<unsigned long>(z < 0 ? -z : z));
    return z >= 0 ? Rational(BigInt(1), p) : Rational(p);
}

Label label_of_head(const BigInt& head) {
    const unsigned long r = mpz_fdiv_ui(head.get_mpz_t(), 3);
    return r == 0 ? Label::Zero : (r == 1 ? Label::Plus : Label::Minus);
}

int label_value(Label l) { return static_cast<int>(l); }

int mod3(int v) { return ((v % 3) + 3) % 3; }

// [y / 3^z] for every z from z_hi + 1 down to z_lo, when constant on the interval.
RowInfo build_row(const ExactInterval& y, std::int64_t z_hi, std::int64_t z_lo) {
    RowInfo row;
    for (std::int64_t z = z_hi + 1; z >= z_lo; --z) {
        auto [first, last] = nearest_range(y.scaled(pow3_inverse(z)));
        const bool known = first == last;
        if (z == z_hi + 1) {
            if (known) {
                row.above = first;
            }
            continue;
        }
        row.labels.push_back(known ? label_of_head(first) : Label::Unknown);
        row.tail_odd.push_back(known ? std::optional<bool>(mpz_odd_p(first.get_mpz_t()) != 0) : std::nullopt);
    }
    return row;
}

template <typename RowValue>
OrbitGraphWindow build_generic(RowValue&& row_value, std::pair<std::int64_t, std::int64_t> rows,
                               std::pair<std::int64_t, std::int64_t> cols) {
    OrbitGraphWindow w;
    w.n0 = rows.first;
    w.n1 = rows.second;
    w.z_hi = std::max(cols.first, cols.second);
    w.z_lo = std::min(cols.first, cols.second);
    if (w.empty()) {
        return w;
    }
    w.before = build_row(row_value(w.n0 - 1), w.z_hi, w.z_lo);
    for (std::int64_t n = w.n0; n <= w.n1; ++n) {
        w.rows.push_back(build_row(row_value(n), w.z_hi, w.z_lo));
    }
    for (std::int64_t n = w.n0; n <= w.n1; ++n) {
        const RowInfo& row = w.rows[static_cast<std::size_t>(n - w.n0)];
        for (std::size_t c = 0; c < row.labels.size(); ++c) {
            const std::int64_t z = w.z_hi - static_cast<std::int64_t>(c);
            if (row.labels[c] == Label::Unknown) {
                w.undetermined.push_back({n, z});
                continue;
            }
            if (n < w.n1 && row.tail_odd[c]) {
                w.edges.push_back({{n, z}, {n + 1, *row.tail_odd[c] ? z : z + 1}});
            }
        }
    }
    return w;
}

const RowInfo& row_at(const OrbitGraphWindow& w, std::int64_t n) {
    if (n == w.n0 - 1) {
        return w.before;
    }
    return w.rows.at(static_cast<std::size_t>(n - w.n0));
}

Label label_in(const RowInfo& row, const OrbitGraphWindow& w, std::int64_t z) {
    if (z > w.z_hi || z < w.z_lo) {
        return Label::Unknown;
    }
    return row.labels[static_cast<std::size_t>(w.z_hi - z)];
}

std::optional<bool> tail_in(const RowInfo& row, const OrbitGraphWindow& w, std::int64_t z) {
    if (z > w.z_hi || z < w.z_lo) {
        return std::nullopt;
    }
    return row.tail_odd[static_cast<std::size_t>(w.z_hi - z)];
}

std::string cell(const GridNode& v) { return "(" + std::to_string(v.n) + ", " + std::to_string(v.z) + ")"; }

} // namespace

char to_char(Label l) noexcept {
    switch (l) {
    case Label::Plus:
        return '+';
    case Label::Minus:
        return '-';
    case Label::Zero:
        return '0';
    case Label::Unknown:
        break;
    }
    return 'U';
}

Label OrbitGraphWindow::label(const GridNode& v) const {
    if (!in_window(v)) {
        throw DomainError("cell " + cell(v) + " outside the window");
    }
    return rows[static_cast<std::size_t>(v.n - n0)].labels[static_cast<std::size_t>(z_hi - v.z)];
}

void OrbitGraphWindow::set_label(const GridNode& v, Label l) {
    if (!in_window(v)) {
        throw DomainError("cell " + cell(v) + " outside the window");
    }
    rows[static_cast<std::size_t>(v.n - n0)].labels[static_cast<std::size_t>(z_hi - v.z)] = l;
}

std::vector<GridNode> OrbitGraphWindow::g_nodes() const {
    std::vector<GridNode> out;
    for (std::int64_t n = n0; n <= n1 && !empty(); ++n) {
        for (std::int64_t z = z_hi; z >= z_lo; --z) {
            if (is_nonzero(label({n, z}))) {
                out.push_back({n, z});
            }
        }
    }
    return out;
}

std::vector<GridEdge> OrbitGraphWindow::g_edges() const {
    std::vector<GridEdge> out;
    for (const auto& e : edges) {
        if (in_window(e.to) && is_nonzero(label(e.from)) && is_nonzero(label(e.to))) {
            out.push_back(e);
        }
    }
    return out;
}

std::string OrbitGraphWindow::row_string(std::int64_t n) const {
    std::string s;
    const RowInfo& row = row_at(*this, n);
    if (z_hi < 0) {
        s.push_back('.');
    }
    for (std::int64_t z = z_hi; z >= z_lo; --z) {
        s.push_back(to_char(label_in(row, *this, z)));
        if (z == 0 && z_lo < 0) {
            s.push_back('.');
        }
    }
    return s;
}

OrbitGraphWindow build_window(const TernaryDyadic& x, std::pair<std::int64_t, std::int64_t> rows,
                              std::pair<std::int64_t, std::int64_t> cols) {
    return build_generic(
        [&](std::int64_t n) { return ExactInterval::point(x.scaled(n, n).to_rational()); }, rows, cols);
}

OrbitGraphWindow build_window(const DigitStreamReal& x, std::pair<std::int64_t, std::int64_t> rows,
                              std::pair<std::int64_t, std::int64_t> cols) {
    if (rows.first < 0 && rows.first <= rows.second) {
        throw DomainError("digit-prefix inputs support only rows n >= 0");
    }
    return build_generic(
        [&](std::int64_t n) {
            // (3/2)^n, with n = n0 - 1 = -1 possible for the leaf-test row
            BigInt three;
            BigInt two;
            mpz_ui_pow_ui(three.get_mpz_t(), 3, static_cast<unsigned long>(n < 0 ? -n : n));
            mpz_ui_pow_ui(two.get_mpz_t(), 2, static_cast<unsigned long>(n < 0 ? -n : n));
            return x.interval.scaled(n >= 0 ? Rational(three, two) : Rational(two, three));
        },
        rows, cols);
}

void require_determined(const OrbitGraphWindow& w) {
    if (w.undetermined.empty()) {
        return;
    }
    std::string msg = "prefix does not determine " + std::to_string(w.undetermined.size()) + " cells:";
    const std::size_t shown = std::min<std::size_t>(w.undetermined.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) {
        msg += " " + cell(w.undetermined[i]);
    }
    if (shown < w.undetermined.size()) {
        msg += " ...";
    }
    throw PrecisionExhausted(msg);
}

std::vector<Violation> check_nonzero_propagation(const OrbitGraphWindow& w) {
    std::vector<Violation> out;
    for (const auto& e : w.edges) {
        if (!w.in_window(e.to) || !is_nonzero(w.label(e.from))) {
            continue;
        }
        if (w.label(e.to) == Label::Zero) {
            out.push_back({e.from, "non-zero " + cell(e.from) + " points to zero-labelled " + cell(e.to)});
        }
    }
    return out;
}

std::vector<Violation> check_recurrence(const OrbitGraphWindow& w) {
    std::vector<Violation> out;
    for (std::int64_t n = w.n0; n < w.n1; ++n) {
        for (std::int64_t z = w.z_hi - 1; z >= w.z_lo + 1; --z) {
            const Label a = w.label({n, z});
            const Label b = w.label({n, z - 1});
            const Label c = w.label({n + 1, z});
            const Label d = w.label({n + 1, z + 1});
            if (a == Label::Unknown || b == Label::Unknown || c == Label::Unknown || d == Label::Unknown) {
                continue;
            }
            const int av = label_value(a);
            const int bv = label_value(b);
            const int cv = label_value(c);
            const int expected = mod3(-av + cv + bv * cv * (cv + bv));
            if (mod3(label_value(d)) != expected) {
                out.push_back({{n + 1, z + 1}, "recurrence fails at " + cell({n + 1, z + 1})});
            }
        }
    }
    return out;
}

std::vector<Violation> check_edge_rule(const OrbitGraphWindow& w) {
    std::vector<Violation> out;
    for (std::int64_t n = w.n0; n <= w.n1 && !w.empty(); ++n) {
        const RowInfo& row = row_at(w, n);
        if (!row.above) {
            continue;
        }
        // Non-zero digit count of the part above the window.
        const BigInt& head = *row.above;
        int count = 0;
        if (sgn(head) != 0) {
            const auto top = static_cast<std::int64_t>(mpz_sizeinbase(head.get_mpz_t(), 3)) + 1;
            for (Digit d : digits_of_rational(Rational(head), top, 0)) {
                count += d != Digit::Zero ? 1 : 0;
            }
        }
        for (std::int64_t z = w.z_hi; z >= w.z_lo; --z) {
            const Label l = label_in(row, w, z);
            if (l == Label::Unknown) {
                break;
            }
            count += is_nonzero(l) ? 1 : 0;
            const auto odd = tail_in(row, w, z);
            if (odd && *odd != (count % 2 == 1)) {
                out.push_back({{n, z}, "tail parity disagrees with digit count at " + cell({n, z})});
            }
        }
    }
    return out;
}

ComponentLabeling components(const OrbitGraphWindow& w) {
    const auto nodes = w.g_nodes();
    std::map<GridNode, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        index.emplace(nodes[i], i);
    }
    std::vector<std::size_t> parent(nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    for (const auto& e : w.g_edges()) {
        const auto a = find(index.at(e.from));
        const auto b = find(index.at(e.to));
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
    ComponentLabeling out;
    std::map<std::size_t, std::int64_t> root_id;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto r = find(i);
        auto [it, fresh] = root_id.emplace(r, out.count);
        if (fresh) {
            ++out.count;
        }
        out.id.emplace(nodes[i], it->second);
    }
    return out;
}

BranchPath leftmost_branch(const OrbitGraphWindow& w) {
    BranchPath path;
    if (w.empty()) {
        return path;
    }
    for (std::int64_t i = w.n0; i <= w.n1; ++i) {
        const RowInfo& row = row_at(w, i);
        if (!row.above || sgn(*row.above) != 0) {
            throw BoundaryUndetermined("row " + std::to_string(i) + " may have non-zero digits left of the window");
        }
        std::optional<std::int64_t> j;
        for (std::int64_t z = w.z_hi; z >= w.z_lo && !j; --z) {
            const Label l = label_in(row, w, z);
            if (l == Label::Unknown) {
                throw BoundaryUndetermined("row " + std::to_string(i) + " has an undetermined digit at " +
                                           std::to_string(z));
            }
            if (is_nonzero(l)) {
                j = z;
            }
        }
        if (!j) {
            throw BoundaryUndetermined("row " + std::to_string(i) + " has no non-zero digit inside the window");
        }
        // Incoming G edges can only come from (i-1, j) with odd tail or (i-1, j-1) with even tail.
        const RowInfo& prev = row_at(w, i - 1);
        bool target = false;
        bool decided = true;
        for (std::int64_t v : {*j, *j - 1}) {
            const Label l = label_in(prev, w, v);
            const auto odd = tail_in(prev, w, v);
            if (l == Label::Unknown || !odd) {
                decided = false;
                continue;
            }
            if (is_nonzero(l) && (*odd ? v : v + 1) == *j) {
                target = true;
            }
        }
        if (!target && !decided) {
            throw BoundaryUndetermined("incoming edges of (" + std::to_string(i) + ", " + std::to_string(*j) +
                                       ") lie outside the window");
        }
        const std::int64_t k = target ? *j : *j - 1;
        if (k < w.z_lo) {
            throw BoundaryUndetermined("branch column " + std::to_string(k) + " in row " + std::to_string(i) +
                                       " lies right of the window");
        }
        path.nodes.push_back({i, k});
    }
    return path;
}

std::string export_graph(const OrbitGraphWindow& w, GraphFormat format) {
    const auto nodes = w.g_nodes();
    const auto edges = w.g_edges();
    if (format == GraphFormat::Json) {
        nlohmann::ordered_json j;
        j["schema"] = 1;
        j["rows"] = {w.n0, w.n1};
        j["cols"] = {w.z_hi, w.z_lo};
        auto jn = nlohmann::ordered_json::array();
        for (const auto& v : nodes) {
            jn.push_back({{"n", v.n}, {"z", v.z}, {"digit", std::string(1, to_char(w.label(v)))}});
        }
        auto je = nlohmann::ordered_json::array();
        for (const auto& e : edges) {
            je.push_back({{"from", {e.from.n, e.from.z}}, {"to", {e.to.n, e.to.z}}});
        }
        j["nodes"] = std::move(jn);
        j["edges"] = std::move(je);
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << "digraph G {\n";
    std::int64_t current = w.n0 - 1;
    bool open = false;
    for (const auto& v : nodes) {
        if (v.n != current) {
            if (open) {
                os << "  }\n";
            }
            os << "  { rank=same;\n";
            current = v.n;
            open = true;
        }
        os << "    \"" << v.name() << "\" [label=\"" << to_char(w.label(v)) << "\"];\n";
    }
    if (open) {
        os << "  }\n";
    }
    for (const auto& e : edges) {
        os << "  \"" << e.from.name() << "\" -> \"" << e.to.name() << "\";\n";
    }
    os << "}\n";
    return os.str();
}

std::optional<PatternShift> find_pattern(const OrbitGraphWindow& pattern, const TernaryDyadic& y,
                                         std::pair<std::int64_t, std::int64_t> row_shift,
                                         std::pair<std::int64_t, std::int64_t> col_shift) {
    if (pattern.empty()) {
        return PatternShift{row_shift.first, col_shift.first};
    }
    const auto hay = build_window(y, {pattern.n0 + row_shift.first, pattern.n1 + row_shift.second},
                                  {pattern.z_hi + col_shift.second, pattern.z_lo + col_shift.first});
    for (std::int64_t dn = row_shift.first; dn <= row_shift.second; ++dn) {
        for (std::int64_t dz = col_shift.first; dz <= col_shift.second; ++dz) {
            bool match = true;
            for (std::int64_t n = pattern.n0; n <= pattern.n1 && match; ++n) {
                for (std::int64_t z = pattern.z_hi; z >= pattern.z_lo && match; --z) {
                    match = pattern.label({n, z}) == hay.label({n + dn, z + dz});
                }
            }
            if (match) {
                return PatternShift{dn, dz};
            }
        }
    }
    return std::nullopt;
}

} // namespace rcollatz
