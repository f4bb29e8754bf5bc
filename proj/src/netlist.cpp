// Copyright 2026 The imqed authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "imqed/netlist.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "imqed/log.hpp"
#include "imqed/units.hpp"

namespace imqed {

std::vector<int> Circuit::junction_port_indices() const {
    std::vector<int> out;
    for (int i = 0; i < n_ports(); ++i)
        if (std::holds_alternative<JunctionPort>(ports[i])) out.push_back(i);
    return out;
}

std::vector<int> Circuit::drive_port_indices() const {
    std::vector<int> out;
    for (int i = 0; i < n_ports(); ++i)
        if (std::holds_alternative<DrivePort>(ports[i])) out.push_back(i);
    return out;
}

// --------------------------------------------------------------------
// DSL parser
// --------------------------------------------------------------------

namespace {

struct Token {
    std::string text;
    int line, col;
};

double unit_multiplier(const std::string& u, bool& is_ghz) {
    is_ghz = false;
    if (u.empty()) return 1.0;
    static const std::map<std::string, double> table = {
        {"F", 1.0},      {"fF", 1e-15},  {"pF", 1e-12}, {"nF", 1e-9},
        {"uF", 1e-6},    {"H", 1.0},     {"fH", 1e-15}, {"pH", 1e-12},
        {"nH", 1e-9},    {"uH", 1e-6},   {"mH", 1e-3},  {"Ohm", 1.0},
        {"ohm", 1.0},    {"kOhm", 1e3},  {"kohm", 1e3}, {"Hz", 1.0},
        {"kHz", 1e3},    {"MHz", 1e6},
    };
    if (u == "GHz") {
        is_ghz = true;
        return 1e9;
    }
    auto it = table.find(u);
    if (it == table.end()) return -1.0;
    return it->second;
}

// "100fF" -> 1e-13, "11.37GHz" -> 11.37e9 (flag says the unit was GHz so
// junction energies can be rescaled by h).
double parse_value(const Token& t, bool* was_ghz = nullptr) {
    const std::string& s = t.text;
    size_t pos = 0;
    try {
        double v = std::stod(s, &pos);
        bool ghz = false;
        std::string suffix = s.substr(pos);
        double mult = unit_multiplier(suffix, ghz);
        if (mult < 0.0)
            throw SyntaxError(t.line, t.col, "unknown unit '" + suffix + "'");
        if (was_ghz) *was_ghz = ghz;
        return v * mult;
    } catch (const std::invalid_argument&) {
        throw SyntaxError(t.line, t.col, "expected a number, got '" + s + "'");
    } catch (const std::out_of_range&) {
        throw SyntaxError(t.line, t.col, "number out of range: '" + s + "'");
    }
}

bool is_ground(const std::string& name) {
    return name == "gnd" || name == "GND" || name == "0";
}

class NodeTable {
  public:
    int lookup(const std::string& name) {
        if (is_ground(name)) return kGround;
        auto it = index_.find(name);
        if (it != index_.end()) return it->second;
        int id = static_cast<int>(names_.size());
        index_[name] = id;
        names_.push_back(name);
        return id;
    }
    std::vector<std::string> names() const { return names_; }

  private:
    std::map<std::string, int> index_;
    std::vector<std::string> names_;
};

// key=value argument on port/circulator lines.
std::pair<std::string, Token> split_kv(const Token& t) {
    auto eq = t.text.find('=');
    if (eq == std::string::npos)
        throw SyntaxError(t.line, t.col, "expected key=value, got '" + t.text + "'");
    Token v{t.text.substr(eq + 1), t.line, t.col + static_cast<int>(eq) + 1};
    return {t.text.substr(0, eq), v};
}

void check_distinct(int a, int b, const Token& t) {
    if (a == b)
        throw SemanticError("line " + std::to_string(t.line) +
                            ": element terminals must be distinct nodes");
}

}  // namespace

Circuit parse(const std::string& text) {
    // Tokenize into statements ('#' comments, ';' and newline separators).
    std::vector<std::vector<Token>> statements;
    std::vector<Token> current;
    int line = 1, col = 1;
    std::string word;
    int word_col = 1;
    auto flush_word = [&]() {
        if (!word.empty()) {
            current.push_back({word, line, word_col});
            word.clear();
        }
    };
    auto flush_stmt = [&]() {
        flush_word();
        if (!current.empty()) statements.push_back(std::move(current));
        current.clear();
    };
    for (size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (ch == '#') {
            while (i < text.size() && text[i] != '\n') ++i;
            --i;
            flush_word();
            continue;
        }
        if (ch == '\n' || ch == ';') {
            flush_stmt();
            if (ch == '\n') {
                ++line;
                col = 0;
            }
        } else if (std::isspace(static_cast<unsigned char>(ch))) {
            flush_word();
        } else {
            if (word.empty()) word_col = col;
            word.push_back(ch);
        }
        ++col;
    }
    flush_stmt();

    Circuit ckt;
    NodeTable nodes;
    std::set<std::string> port_labels;

    for (const auto& st : statements) {
        const Token& head = st[0];
        auto need = [&](size_t n) {
            if (st.size() != n)
                throw SyntaxError(head.line, head.col,
                                  "'" + head.text + "' expects " +
                                      std::to_string(n - 1) + " arguments");
        };
        if (head.text == "C" || head.text == "L") {
            need(4);
            int a = nodes.lookup(st[1].text);
            int b = nodes.lookup(st[2].text);
            check_distinct(a, b, head);
            double v = parse_value(st[3]);
            if (v <= 0.0)
                throw SemanticError("line " + std::to_string(head.line) +
                                    ": element value must be positive");
            if (head.text == "C")
                ckt.elements.push_back(Capacitor{a, b, v});
            else
                ckt.elements.push_back(Inductor{a, b, v});
        } else if (head.text == "G") {
            need(4);
            int a = nodes.lookup(st[1].text);
            int b = nodes.lookup(st[2].text);
            check_distinct(a, b, head);
            double r = parse_value(st[3]);
            if (r <= 0.0)
                throw SemanticError("line " + std::to_string(head.line) +
                                    ": gyration resistance must be positive");
            ckt.elements.push_back(Gyrator{a, b, r});
        } else if (head.text == "T") {
            need(4);
            int p = nodes.lookup(st[1].text);
            int s = nodes.lookup(st[2].text);
            check_distinct(p, s, head);
            double n = parse_value(st[3]);
            if (n == 0.0)
                throw SemanticError("line " + std::to_string(head.line) +
                                    ": transformer ratio must be nonzero");
            ckt.elements.push_back(Transformer{p, s, n});
        } else if (head.text == "X") {
            need(6);
            int a = nodes.lookup(st[1].text);
            int b = nodes.lookup(st[2].text);
            int c = nodes.lookup(st[3].text);
            if (a == b || b == c || a == c)
                throw SemanticError("line " + std::to_string(head.line) +
                                    ": circulator nodes must be distinct");
            double phi = 0.0, r = 0.0;
            for (size_t k = 4; k < 6; ++k) {
                auto [key, val] = split_kv(st[k]);
                if (key == "phi")
                    phi = parse_value(val);
                else if (key == "R")
                    r = parse_value(val);
                else
                    throw SyntaxError(val.line, val.col,
                                      "circulator takes phi= and R=");
            }
            if (phi <= -kPi || phi > kPi)
                throw SemanticError("circulator phase must be in (-pi, pi]");
            if (std::abs(phi) < 1e-9 || std::abs(std::abs(phi) - kPi) < 1e-9)
                throw SemanticError(
                    "circulator phase 0 or pi is not realizable");
            if (r <= 0.0)
                throw SemanticError("circulator R must be positive");
            ckt.elements.push_back(Circulator3{a, b, c, phi, r});
        } else if (head.text == "port") {
            if (st.size() < 5)
                throw SyntaxError(head.line, head.col,
                                  "port expects: label n+ n- args...");
            std::string label = st[1].text;
            if (!port_labels.insert(label).second)
                throw SemanticError("duplicate port label '" + label + "'");
            int a = nodes.lookup(st[2].text);
            int b = nodes.lookup(st[3].text);
            check_distinct(a, b, head);
            double ej = 0.0, cj = 0.0, z0 = 0.0;
            for (size_t k = 4; k < st.size(); ++k) {
                auto [key, val] = split_kv(st[k]);
                bool ghz = false;
                double v = parse_value(val, &ghz);
                if (key == "EJ") {
                    ej = ghz ? kPlanck * v : v;
                } else if (key == "CJ") {
                    cj = v;
                } else if (key == "Z0") {
                    z0 = v;
                } else {
                    throw SyntaxError(val.line, val.col,
                                      "port takes EJ=, CJ= or Z0=");
                }
            }
            if (z0 > 0.0 && (ej > 0.0 || cj > 0.0))
                throw SemanticError("port '" + label +
                                    "' mixes junction and drive arguments");
            if (z0 > 0.0) {
                ckt.ports.push_back(DrivePort{label, a, b, z0});
            } else {
                if (ej <= 0.0 || cj <= 0.0)
                    throw SemanticError("junction port '" + label +
                                        "' needs EJ>0 and CJ>0");
                ckt.ports.push_back(JunctionPort{label, a, b, ej, cj});
            }
        } else {
            throw SyntaxError(head.line, head.col,
                              "unknown element '" + head.text + "'");
        }
    }
    ckt.node_names = nodes.names();
    if (ckt.ports.empty()) throw SemanticError("circuit declares no ports");

    // Connectivity: every node must reach ground through elements/ports.
    int n = ckt.n_nodes();
    std::vector<std::vector<int>> adj(n + 1);  // index n plays ground
    auto link = [&](int a, int b) {
        int ia = a == kGround ? n : a;
        int ib = b == kGround ? n : b;
        adj[ia].push_back(ib);
        adj[ib].push_back(ia);
    };
    for (const auto& el : ckt.elements) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, Capacitor> ||
                              std::is_same_v<T, Inductor>)
                    link(e.a, e.b);
                else if constexpr (std::is_same_v<T, Gyrator>)
                    link(e.left, e.right);
                else if constexpr (std::is_same_v<T, Circulator3>) {
                    link(e.a, e.b);
                    link(e.b, e.c);
                } else if constexpr (std::is_same_v<T, Transformer>)
                    link(e.primary, e.secondary);
            },
            el);
    }
    for (const auto& p : ckt.ports) {
        std::visit([&](const auto& q) { link(q.a, q.b); }, p);
    }
    std::vector<bool> seen(n + 1, false);
    std::vector<int> stack = {n};
    seen[n] = true;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = true;
                stack.push_back(v);
            }
    }
    for (int i = 0; i < n; ++i)
        if (!seen[i])
            throw SemanticError("node '" + ckt.node_names[i] +
                                "' is not connected to ground");
    return ckt;
}

std::string to_netlist(const Circuit& c) {
    std::ostringstream os;
    os.precision(17);
    auto nm = [&](int i) {
        return i == kGround ? std::string("gnd") : c.node_names[i];
    };
    for (const auto& el : c.elements) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, Capacitor>)
                    os << "C " << nm(e.a) << " " << nm(e.b) << " " << e.farad
                       << "\n";
                else if constexpr (std::is_same_v<T, Inductor>)
                    os << "L " << nm(e.a) << " " << nm(e.b) << " " << e.henry
                       << "\n";
                else if constexpr (std::is_same_v<T, Gyrator>)
                    os << "G " << nm(e.left) << " " << nm(e.right) << " "
                       << e.r_gyr << "\n";
                else if constexpr (std::is_same_v<T, Circulator3>)
                    os << "X " << nm(e.a) << " " << nm(e.b) << " " << nm(e.c)
                       << " phi=" << e.phi << " R=" << e.r << "\n";
                else if constexpr (std::is_same_v<T, Transformer>)
                    os << "T " << nm(e.primary) << " " << nm(e.secondary)
                       << " " << e.ratio << "\n";
            },
            el);
    }
    for (const auto& p : c.ports) {
        if (const auto* j = std::get_if<JunctionPort>(&p)) {
            os << "port " << j->label << " " << nm(j->a) << " " << nm(j->b)
               << " EJ=" << j->e_j / kPlanck / 1e9 << "GHz CJ=" << j->c_j
               << "\n";
        } else {
            const auto& d = std::get<DrivePort>(p);
            os << "port " << d.label << " " << nm(d.a) << " " << nm(d.b)
               << " Z0=" << d.z0 << "\n";
        }
    }
    return os.str();
}

// --------------------------------------------------------------------
// Circuit stamps shared by the MNA solves, the pole eigenproblem and
// the classical integrator.
// --------------------------------------------------------------------

namespace {

Mat circulator_admittance(double phi, double r) {
    Mat m(3, 3);
    m << 0, -1, 1, 1, 0, -1, -1, 1, 0;
    return -(std::tan(phi / 2.0) / (std::sqrt(3.0) * r)) * m;
}

struct StampOptions {
    bool short_ports = false;            // merge port node pairs
    bool include_junction_l = false;     // stamp phi0^2/E_J inductors
    bool include_drive_r = false;        // stamp 1/Z0 conductances
};

struct Stamps {
    int nv = 0;                 // merged non-ground node count
    std::vector<int> node_map;  // circuit node -> merged index / kGround
    Mat cmat, gmat;             // node capacitance / conductance parts
    struct Branch {
        int a, b;
        double value;  // inductance (H) or transformer ratio
    };
    std::vector<Branch> inductors;
    std::vector<Branch> transformers;
};

Stamps collect_stamps(const Circuit& c, const StampOptions& opt) {
    int n = c.n_nodes();
    // Union-find for port shorting; ground is sticky.
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<bool> grounded(n, false);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int a, int b) {
        if (a == kGround && b == kGround) return;
        if (a == kGround) {
            grounded[find(b)] = true;
            return;
        }
        if (b == kGround) {
            grounded[find(a)] = true;
            return;
        }
        int ra = find(a), rb = find(b);
        if (ra != rb) {
            parent[rb] = ra;
            if (grounded[rb]) grounded[ra] = true;
        }
    };
    if (opt.short_ports) {
        for (const auto& p : c.ports)
            std::visit([&](const auto& q) { unite(q.a, q.b); }, p);
    }
    Stamps st;
    st.node_map.assign(n, kGround);
    int next = 0;
    std::map<int, int> root_index;
    for (int i = 0; i < n; ++i) {
        int r = find(i);
        if (grounded[r]) {
            st.node_map[i] = kGround;
            continue;
        }
        auto it = root_index.find(r);
        if (it == root_index.end()) {
            root_index[r] = next;
            st.node_map[i] = next++;
        } else {
            st.node_map[i] = it->second;
        }
    }
    st.nv = next;
    st.cmat = Mat::Zero(st.nv, st.nv);
    st.gmat = Mat::Zero(st.nv, st.nv);

    auto mapped = [&](int node) {
        return node == kGround ? kGround : st.node_map[node];
    };
    auto stamp_pair = [&](Mat& m, int a, int b, double v) {
        if (a != kGround) m(a, a) += v;
        if (b != kGround) m(b, b) += v;
        if (a != kGround && b != kGround) {
            m(a, b) -= v;
            m(b, a) -= v;
        }
    };
    // Antisymmetric conductance: i_a += g * v_b, i_b -= g * v_a.
    auto stamp_gyr = [&](int a, int b, double g) {
        if (a != kGround && b != kGround) {
            st.gmat(a, b) += g;
            st.gmat(b, a) -= g;
        }
        // A grounded terminal kills the corresponding row/column.
    };

    for (const auto& el : c.elements) {
        std::visit(
            [&](const auto& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, Capacitor>) {
                    stamp_pair(st.cmat, mapped(e.a), mapped(e.b), e.farad);
                } else if constexpr (std::is_same_v<T, Inductor>) {
                    int a = mapped(e.a), b = mapped(e.b);
                    if (a != b) st.inductors.push_back({a, b, e.henry});
                } else if constexpr (std::is_same_v<T, Gyrator>) {
                    stamp_gyr(mapped(e.left), mapped(e.right), 1.0 / e.r_gyr);
                } else if constexpr (std::is_same_v<T, Circulator3>) {
                    Mat y = circulator_admittance(e.phi, e.r);
                    int idx[3] = {mapped(e.a), mapped(e.b), mapped(e.c)};
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j) {
                            if (idx[i] == kGround || idx[j] == kGround)
                                continue;
                            st.gmat(idx[i], idx[j]) += y(i, j);
                        }
                } else if constexpr (std::is_same_v<T, Transformer>) {
                    int p = mapped(e.primary), s = mapped(e.secondary);
                    if (p != s) st.transformers.push_back({p, s, e.ratio});
                }
            },
            el);
    }
    for (const auto& p : c.ports) {
        if (const auto* j = std::get_if<JunctionPort>(&p)) {
            int a = mapped(j->a), b = mapped(j->b);
            stamp_pair(st.cmat, a, b, j->c_j);
            if (opt.include_junction_l && a != b)
                st.inductors.push_back({a, b, junction_inductance(j->e_j)});
        } else {
            const auto& d = std::get<DrivePort>(p);
            if (opt.include_drive_r)
                stamp_pair(st.gmat, mapped(d.a), mapped(d.b), 1.0 / d.z0);
        }
    }
    return st;
}

// Full MNA matrix at complex s: node block + inductor and transformer
// branch rows.  Layout: [nodes | inductor currents | transformer currents].
CMat mna_matrix(const Stamps& st, Complex s) {
    int nl = static_cast<int>(st.inductors.size());
    int nt = static_cast<int>(st.transformers.size());
    int dim = st.nv + nl + nt;
    CMat a = CMat::Zero(dim, dim);
    a.topLeftCorner(st.nv, st.nv) =
        st.cmat.cast<Complex>() * s + st.gmat.cast<Complex>();
    for (int l = 0; l < nl; ++l) {
        const auto& br = st.inductors[l];
        int row = st.nv + l;
        if (br.a != kGround) {
            a(br.a, row) += 1.0;
            a(row, br.a) += 1.0;
        }
        if (br.b != kGround) {
            a(br.b, row) -= 1.0;
            a(row, br.b) -= 1.0;
        }
        a(row, row) = -s * br.value;
    }
    for (int t = 0; t < nt; ++t) {
        const auto& br = st.transformers[t];
        int row = st.nv + nl + t;
        if (br.a != kGround) {
            a(br.a, row) += 1.0;
            a(row, br.a) += 1.0;
        }
        if (br.b != kGround) {
            a(br.b, row) -= br.value;
            a(row, br.b) -= br.value;
        }
    }
    return a;
}

std::vector<std::pair<int, int>> port_nodes(const Circuit& c,
                                            const Stamps& st) {
    std::vector<std::pair<int, int>> out;
    for (const auto& p : c.ports) {
        std::visit(
            [&](const auto& q) {
                int a = q.a == kGround ? kGround : st.node_map[q.a];
                int b = q.b == kGround ? kGround : st.node_map[q.b];
                out.push_back({a, b});
            },
            p);
    }
    return out;
}

void check_solution(const CMat& a, const CMat& x, const CMat& b) {
    double scale = a.norm() * x.norm() + b.norm();
    if (scale == 0.0) return;
    double resid = (a * x - b).norm() / scale;
    if (!std::isfinite(resid) || resid > 1e-8)
        throw SingularAtFrequencyError(
            "MNA system is singular at this frequency (relative residual " +
            std::to_string(resid) + ")");
}

}  // namespace

CMat mna_impedance_s(const Circuit& c, Complex s) {
    Stamps st = collect_stamps(c, {});
    CMat a = mna_matrix(st, s);
    auto pn = port_nodes(c, st);
    int np = c.n_ports();
    CMat b = CMat::Zero(a.rows(), np);
    for (int j = 0; j < np; ++j) {
        if (pn[j].first != kGround) b(pn[j].first, j) += 1.0;
        if (pn[j].second != kGround) b(pn[j].second, j) -= 1.0;
    }
    Eigen::PartialPivLU<CMat> lu(a);
    CMat x = lu.solve(b);
    check_solution(a, x, b);
    CMat z = CMat::Zero(np, np);
    for (int i = 0; i < np; ++i) {
        for (int j = 0; j < np; ++j) {
            Complex v = 0.0;
            if (pn[i].first != kGround) v += x(pn[i].first, j);
            if (pn[i].second != kGround) v -= x(pn[i].second, j);
            z(i, j) = v;
        }
    }
    return z;
}

CMat mna_admittance_s(const Circuit& c, Complex s) {
    Stamps st = collect_stamps(c, {});
    CMat core = mna_matrix(st, s);
    auto pn = port_nodes(c, st);
    int np = c.n_ports();
    int dim = static_cast<int>(core.rows());
    CMat a = CMat::Zero(dim + np, dim + np);
    a.topLeftCorner(dim, dim) = core;
    for (int k = 0; k < np; ++k) {
        int row = dim + k;
        if (pn[k].first != kGround) {
            a(pn[k].first, row) += 1.0;
            a(row, pn[k].first) += 1.0;
        }
        if (pn[k].second != kGround) {
            a(pn[k].second, row) -= 1.0;
            a(row, pn[k].second) -= 1.0;
        }
    }
    CMat b = CMat::Zero(dim + np, np);
    for (int j = 0; j < np; ++j) b(dim + j, j) = 1.0;
    Eigen::PartialPivLU<CMat> lu(a);
    CMat x = lu.solve(b);
    check_solution(a, x, b);
    // Source current variable flows out of the + node; the admittance
    // parameter is the current delivered into the network.
    CMat y = CMat::Zero(np, np);
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j) y(i, j) = -x(dim + i, j);
    return y;
}

CMat mna_admittance(const Circuit& c, double omega) {
    return mna_admittance_s(c, Complex(0.0, omega));
}

CMat mna_impedance(const Circuit& c, double omega) {
    return mna_impedance_s(c, Complex(0.0, omega));
}

// --------------------------------------------------------------------
// Poles, residues and dc terms
// --------------------------------------------------------------------

namespace {

// Oscillation frequencies of the lossless first-order system
//   [C 0; 0 L] d/dt [v; i] = [-G -A; A^T 0] [v; i]
// as a generalized eigenproblem (transformer rows are algebraic).
std::vector<double> internal_frequencies(const Stamps& st,
                                         double lossless_tol,
                                         double zero_mode_rel) {
    int nl = static_cast<int>(st.inductors.size());
    int nt = static_cast<int>(st.transformers.size());
    int dim = st.nv + nl + nt;
    if (dim == 0) return {};
    Mat e = Mat::Zero(dim, dim);
    Mat a = Mat::Zero(dim, dim);
    e.topLeftCorner(st.nv, st.nv) = st.cmat;
    a.topLeftCorner(st.nv, st.nv) = -st.gmat;
    for (int l = 0; l < nl; ++l) {
        const auto& br = st.inductors[l];
        int row = st.nv + l;
        e(row, row) = br.value;
        if (br.a != kGround) {
            a(br.a, row) -= 1.0;
            a(row, br.a) += 1.0;
        }
        if (br.b != kGround) {
            a(br.b, row) += 1.0;
            a(row, br.b) -= 1.0;
        }
    }
    for (int t = 0; t < nt; ++t) {
        const auto& br = st.transformers[t];
        int row = st.nv + nl + t;
        if (br.a != kGround) {
            a(br.a, row) -= 1.0;
            a(row, br.a) += 1.0;
        }
        if (br.b != kGround) {
            a(br.b, row) += br.value;
            a(row, br.b) -= br.value;
        }
    }
    Eigen::GeneralizedEigenSolver<Mat> ges;
    ges.compute(a, e, false);
    std::vector<Complex> finite;
    double scale = 0.0;
    for (int k = 0; k < ges.alphas().size(); ++k) {
        Complex alpha = ges.alphas()(k);
        double beta = ges.betas()(k);
        if (std::abs(beta) < 1e-12 * std::abs(alpha)) continue;  // infinite
        Complex lambda = alpha / beta;
        finite.push_back(lambda);
        scale = std::max(scale, std::abs(lambda));
    }
    std::vector<double> freqs;
    for (Complex lambda : finite) {
        if (std::abs(lambda) < zero_mode_rel * scale) continue;  // zero mode
        if (std::abs(lambda.real()) > lossless_tol * scale)
            throw UnstableSystemError(
                "internal dynamics has an eigenvalue off the imaginary "
                "axis; circuit is not lossless");
        if (lambda.imag() > zero_mode_rel * scale)
            freqs.push_back(lambda.imag());
    }
    std::sort(freqs.begin(), freqs.end());
    return freqs;
}

// Merge near-identical eigenfrequencies; reject near-coincident poles.
std::vector<double> cluster_poles(const std::vector<double>& freqs,
                                  double min_gap_rel) {
    std::vector<double> merged;
    for (double w : freqs) {
        if (!merged.empty() && w - merged.back() < 1e-8 * w) {
            merged.back() = 0.5 * (merged.back() + w);
        } else {
            merged.push_back(w);
        }
    }
    for (size_t i = 1; i < merged.size(); ++i) {
        if (merged[i] - merged[i - 1] < min_gap_rel * merged[i])
            throw DegeneratePoleError(
                "coincident poles at " + std::to_string(merged[i - 1]) +
                " and " + std::to_string(merged[i]) + " rad/s");
    }
    return merged;
}

double frequency_scale(const Circuit& c) {
    std::vector<double> caps, inds;
    for (const auto& el : c.elements) {
        if (const auto* cp = std::get_if<Capacitor>(&el))
            caps.push_back(cp->farad);
        if (const auto* lp = std::get_if<Inductor>(&el))
            inds.push_back(lp->henry);
    }
    for (const auto& p : c.ports)
        if (const auto* j = std::get_if<JunctionPort>(&p))
            caps.push_back(j->c_j);
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    if (!caps.empty() && !inds.empty())
        return 1.0 / std::sqrt(median(caps) * median(inds));
    if (!caps.empty()) return 1.0 / (50.0 * median(caps));
    return kTwoPi * 10e9;
}

}  // namespace

PoleResidueResponse extract_pole_residue(const Circuit& c, Kind kind,
                                         const ExtractOptions& opts) {
    StampOptions sopt;
    sopt.short_ports = (kind == Kind::Admittance);
    Stamps st = collect_stamps(c, sopt);
    std::vector<double> freqs =
        internal_frequencies(st, opts.lossless_tol, opts.zero_mode_rel);
    std::vector<double> poles =
        cluster_poles(freqs, opts.response.min_gap_rel);
    {
        std::ostringstream os;
        os << "extract(" << to_string(kind) << "): " << poles.size()
           << " candidate pole(s):";
        for (double w : poles) os << " " << w;
        log_debug(os.str());
    }

    auto evaluator = [&](Complex s) {
        return kind == Kind::Admittance ? mna_admittance_s(c, s)
                                        : mna_impedance_s(c, s);
    };

    int np = c.n_ports();
    std::vector<AcPole> ac;
    for (double w : poles) {
        CMat res;
        try {
            res = residue_at(evaluator, w, opts.residue);
        } catch (const NotAPoleError&) {
            continue;  // internal mode invisible from the ports
        }
        AcPole p;
        p.omega = w;
        p.res_sym = sym_part(Mat(2.0 * res.real()));
        p.res_anti = antisym_part(Mat(-2.0 * w * res.imag()));
        ac.push_back(std::move(p));
    }

    // dc terms from a least-squares fit on the real axis, after removing
    // the extracted ac poles (exact for lumped networks).
    double scale = frequency_scale(c);
    std::vector<double> sigmas;
    for (double f : {0.07, 0.21, 0.62, 1.9, 5.6, 17.0})
        sigmas.push_back(f * scale);
    int ns = static_cast<int>(sigmas.size());
    std::vector<Mat> rem(ns);
    double full_scale = 0.0;
    for (int k = 0; k < ns; ++k) {
        Complex s(sigmas[k], 0.0);
        CMat f = evaluator(s);
        full_scale += f.real().squaredNorm();
        for (const auto& p : ac)
            f -= (p.res_sym.cast<Complex>() * s + p.res_anti.cast<Complex>()) /
                 (p.omega * p.omega + s * s);
        if (f.imag().norm() > 1e-6 * (1.0 + f.real().norm()))
            throw NumericalError(
                "response is not real on the real axis; extraction failed");
        rem[k] = f.real();
    }
    int nterms = kind == Kind::Admittance ? 3 : 1;  // {1/s, s, 1} or {1/s}
    Mat basis(ns, nterms);
    for (int k = 0; k < ns; ++k) {
        basis(k, 0) = 1.0 / sigmas[k];
        if (nterms == 3) {
            basis(k, 1) = sigmas[k];
            basis(k, 2) = 1.0;
        }
    }
    // The columns span many decades; normalize them before the solve.
    Vec col_scale(nterms);
    for (int c = 0; c < nterms; ++c) {
        col_scale(c) = basis.col(c).norm();
        basis.col(c) /= col_scale(c);
    }
    Eigen::ColPivHouseholderQR<Mat> qr(basis);
    Mat ind_dc = Mat::Zero(np, np), cap_dc = Mat::Zero(np, np),
        nr_dc = Mat::Zero(np, np);
    double fit_resid = 0.0;
    for (int i = 0; i < np; ++i) {
        for (int j = 0; j < np; ++j) {
            Vec rhs(ns);
            for (int k = 0; k < ns; ++k) rhs(k) = rem[k](i, j);
            Vec x = qr.solve(rhs);
            fit_resid += (basis * x - rhs).squaredNorm();
            x.array() /= col_scale.array();
            ind_dc(i, j) = x(0);
            if (nterms == 3) {
                cap_dc(i, j) = x(1);
                nr_dc(i, j) = x(2);
            }
        }
    }
    log_debug("extract: dc fit relative residual " +
              std::to_string(std::sqrt(fit_resid / std::max(full_scale, 1e-300))));
    // The basis is exact for lumped lossless networks; a residual at the
    // level of the full response signals a non-rational input.
    if (full_scale > 0.0 && fit_resid > 1e-14 * full_scale)
        throw NumericalError(
            "dc fit residual too large; response is not in the expected "
            "rational class");

    // Drop dc terms that are pure fit noise, then project onto the exact
    // symmetry classes.
    double typ = std::sqrt(full_scale / ns) + 1e-300;
    if (ind_dc.norm() / sigmas.front() < 1e-9 * typ) ind_dc.setZero();
    if (cap_dc.norm() * sigmas.back() < 1e-9 * typ) cap_dc.setZero();
    if (nr_dc.norm() < 1e-9 * typ) nr_dc.setZero();
    ind_dc = sym_part(ind_dc);
    cap_dc = sym_part(cap_dc);
    nr_dc = antisym_part(nr_dc);

    if (kind == Kind::Impedance) {
        cap_dc.setZero();
        nr_dc.setZero();
    }
    return PoleResidueResponse(kind, np, cap_dc, ind_dc, nr_dc, std::move(ac),
                               opts.response);
}

std::vector<double> circuit_normal_modes(const Circuit& c) {
    StampOptions sopt;
    sopt.include_junction_l = true;
    Stamps st = collect_stamps(c, sopt);
    std::vector<double> freqs = internal_frequencies(st, 1e-7, 1e-9);
    return cluster_poles(freqs, 0.0);
}

// --------------------------------------------------------------------
// Example circuits
// --------------------------------------------------------------------

ExampleName example_from_string(const std::string& name) {
    static const std::map<std::string, ExampleName> table = {
        {"tl_resonator_2port", ExampleName::TlResonator2Port},
        {"inductive_2port", ExampleName::InductiveCoupling2Port},
        {"purcell_chain", ExampleName::PurcellChain3Port},
        {"circulator_capacitive", ExampleName::CirculatorCapacitive},
        {"circulator_resonator", ExampleName::CirculatorResonator},
        {"isolator", ExampleName::Isolator},
    };
    auto it = table.find(name);
    if (it == table.end())
        throw ConfigError("unknown example circuit '" + name + "'");
    return it->second;
}

std::string to_string(ExampleName name) {
    switch (name) {
        case ExampleName::TlResonator2Port: return "tl_resonator_2port";
        case ExampleName::InductiveCoupling2Port: return "inductive_2port";
        case ExampleName::PurcellChain3Port: return "purcell_chain";
        case ExampleName::CirculatorCapacitive:
            return "circulator_capacitive";
        case ExampleName::CirculatorResonator: return "circulator_resonator";
        case ExampleName::Isolator: return "isolator";
    }
    return "?";
}

std::map<std::string, double> example_defaults(ExampleName name) {
    switch (name) {
        case ExampleName::TlResonator2Port:
            return {{"cj_ff", 51.0},  {"cc_ff", 5.1},  {"fr_ghz", 7.07},
                    {"zr_ohm", 50.0}, {"ej1_ghz", 10.22}, {"ej2_ghz", 10.22}};
        case ExampleName::InductiveCoupling2Port:
            return {{"cj_ff", 100.0},   {"cc_ff", 10.0},    {"fr_ghz", 7.8},
                    {"zr_ohm", 50.0},   {"ej1_ghz", 20.4},  {"ej2_ghz", 12.6},
                    {"lc_nh", 100.0}};
        case ExampleName::PurcellChain3Port:
            // Readout-chain parameters from a realistic transmon setup:
            // qubit, readout resonator, Purcell filter, two 50 Ohm lines.
            return {{"lj_nh", 10.0},   {"cj_ff", 77.0},  {"fr_ghz", 7.50},
                    {"ff_ghz", 7.51},  {"zr_ohm", 50.0}, {"zf_ohm", 50.0},
                    {"ck_ff", 20.0},   {"cd_ff", 100.0}, {"cc_ff", 1.0},
                    {"cjd_over_cc", 0.1}, {"crp_ff", 20.0}, {"z0_ohm", 50.0}};
        case ExampleName::CirculatorCapacitive:
            return {{"cj_ff", 100.0}, {"cc_ff", 10.0}, {"cg_ff", 150.0},
                    {"r_ohm", 50.0},  {"phi_rad", kPi / 3.0},
                    {"ej_ghz", 11.37}};
        case ExampleName::CirculatorResonator:
            return {{"cj_ff", 100.0},  {"cjr_ff", 10.0}, {"cg_ff", 10.0},
                    {"crs_ff", 100.0}, {"fr_ghz", 7.0},  {"zr_ohm", 50.0},
                    {"r_ohm", 50.0},   {"phi_rad", kPi / 3.0},
                    {"ej_ghz", 14.51}};
        case ExampleName::Isolator:
            return {{"cj_ff", 100.0},      {"cc_over_cj", 0.01},
                    {"cg_over_cc", 0.01},  {"cd_over_cc", 0.01},
                    {"r_ohm", 2.14e5},     {"z0_over_r", 3.0},
                    {"phi_rad", kPi / 3.0}, {"ej_ghz", 12.77}};
    }
    throw ConfigError("unknown example");
}

namespace {

double get(const std::map<std::string, double>& m, const std::string& key) {
    auto it = m.find(key);
    if (it == m.end()) throw MissingParamError(key);
    return it->second;
}

// Exact pole-residue admittance of three junctions behind pi-capacitive
// filters feeding an ideal circulator with scattering phase phi: a single
// nonreciprocal ac pole at w_y = tan(phi/2)/(R (Cc + Cg)) plus a
// frequency-independent nonreciprocal dc part.
PoleResidueResponse circulator_capacitive_closed_form(double cj, double cc,
                                                      double cg, double r,
                                                      double phi) {
    Mat m(3, 3);
    m << 0, -1, 1, 1, 0, -1, -1, 1, 0;
    Mat ones = Mat::Ones(3, 3);
    Mat id = Mat::Identity(3, 3);
    double gamma = -std::tan(phi / 2.0) / (std::sqrt(3.0) * r);
    double csum = cc + cg;
    double u = cc * cc / (csum * csum);
    double wy = std::sqrt(3.0) * std::abs(gamma) / csum;
    double cbar = cj + cc * cg / csum;

    Mat cap_dc = cbar * id;
    Mat nr_dc = u * gamma * m;
    AcPole pole;
    pole.omega = wy;
    pole.res_sym = (u * gamma * gamma / csum) * (3.0 * id - ones);
    pole.res_anti = -(u * gamma * wy * wy) * m;
    return PoleResidueResponse(Kind::Admittance, 3, cap_dc, Mat::Zero(3, 3),
                               nr_dc, {pole});
}

}  // namespace

BuiltExample build_example(const ExampleSpec& spec) {
    auto params = example_defaults(spec.name);
    for (const auto& [k, v] : spec.params) {
        if (!params.count(k))
            throw ConfigError("unknown parameter '" + k + "' for example " +
                              to_string(spec.name));
        params[k] = v;
    }
    std::ostringstream os;
    os.precision(17);
    std::optional<PoleResidueResponse> closed;

    switch (spec.name) {
        case ExampleName::TlResonator2Port:
        case ExampleName::InductiveCoupling2Port: {
            double cj = get(params, "cj_ff") * 1e-15;
            double cc = get(params, "cc_ff") * 1e-15;
            double wr = ghz_to_radps(get(params, "fr_ghz"));
            double zr = get(params, "zr_ohm");
            double cr = 1.0 / (zr * wr), lr = zr / wr;
            os << "C q1 r " << cc << "\nC q2 r " << cc << "\n";
            os << "C r gnd " << cr << "\nL r gnd " << lr << "\n";
            if (spec.name == ExampleName::InductiveCoupling2Port)
                os << "L q1 q2 " << get(params, "lc_nh") * 1e-9 << "\n";
            os << "port J1 q1 gnd EJ=" << get(params, "ej1_ghz")
               << "GHz CJ=" << cj << "\n";
            os << "port J2 q2 gnd EJ=" << get(params, "ej2_ghz")
               << "GHz CJ=" << cj << "\n";
            if (spec.name == ExampleName::TlResonator2Port) {
                // Impedance closed form; the pole frequency is exact, the
                // residue is the leading dispersive-order expression.
                double ct = cj + cc;
                double rcj = cc / cj, rcr = cc / cr;
                double wrz = wr * std::sqrt((rcj + 1.0) /
                                            (2.0 * rcr + rcj + 1.0));
                double rz = rcj / std::sqrt(cr);
                Mat a0 = (1.0 / ct) * Mat::Identity(2, 2);
                AcPole p;
                p.omega = wrz;
                p.res_sym = rz * rz * Mat::Ones(2, 2);
                p.res_anti = Mat::Zero(2, 2);
                closed = PoleResidueResponse(Kind::Impedance, 2, Mat(), a0,
                                             Mat(), {p});
            } else {
                // Admittance closed form: dispersive-order dc and pole
                // data plus the exact inductive dc block.
                double lc = get(params, "lc_nh") * 1e-9;
                double ct = cj + cc;
                double rcj = cc / cj, rcr = cc / cr;
                double wrz = wr * std::sqrt((rcj + 1.0) /
                                            (2.0 * rcr + rcj + 1.0));
                double wry = wrz * (1.0 - rcj * rcr);
                double ry = rcr / std::sqrt(lr);
                Mat dinf(2, 2);
                double cbar_j = ct * (1.0 - rcj * rcr);
                double cbar = cc * rcr;
                dinf << cbar_j, cbar, cbar, cbar_j;
                Mat d0(2, 2);
                d0 << 1.0 / lc, -1.0 / lc, -1.0 / lc, 1.0 / lc;
                AcPole p;
                p.omega = wry;
                p.res_sym = ry * ry * Mat::Ones(2, 2);
                p.res_anti = Mat::Zero(2, 2);
                closed = PoleResidueResponse(Kind::Admittance, 2, dinf, d0,
                                             Mat(), {p});
            }
            break;
        }
        case ExampleName::PurcellChain3Port: {
            double lj = get(params, "lj_nh") * 1e-9;
            double cj = get(params, "cj_ff") * 1e-15;
            double wr = ghz_to_radps(get(params, "fr_ghz"));
            double wf = ghz_to_radps(get(params, "ff_ghz"));
            double zr = get(params, "zr_ohm"), zf = get(params, "zf_ohm");
            double ck = get(params, "ck_ff") * 1e-15;
            double cd = get(params, "cd_ff") * 1e-15;
            double cc = get(params, "cc_ff") * 1e-15;
            double cjd = get(params, "cjd_over_cc") * cc;
            double crp = get(params, "crp_ff") * 1e-15;
            double z0 = get(params, "z0_ohm");
            double ej_ghz = kPhi0 * kPhi0 / lj / kPlanck / 1e9;
            os << "C q r " << cc << "\nC r gnd " << 1.0 / (zr * wr) << "\nL r gnd "
               << zr / wr << "\n";
            os << "C r f " << crp << "\nC f gnd " << 1.0 / (zf * wf)
               << "\nL f gnd " << zf / wf << "\n";
            os << "C f d2 " << ck << "\nC d2 gnd " << cd << "\n";
            os << "C q d1 " << cjd << "\nC d1 gnd " << cd << "\n";
            os << "port J1 q gnd EJ=" << ej_ghz << "GHz CJ=" << cj << "\n";
            os << "port D1 d1 gnd Z0=" << z0 << "\n";
            os << "port D2 d2 gnd Z0=" << z0 << "\n";
            break;
        }
        case ExampleName::CirculatorCapacitive: {
            double cj = get(params, "cj_ff") * 1e-15;
            double cc = get(params, "cc_ff") * 1e-15;
            double cg = get(params, "cg_ff") * 1e-15;
            double r = get(params, "r_ohm");
            double phi = get(params, "phi_rad");
            double ej = get(params, "ej_ghz");
            for (int j = 1; j <= 3; ++j) {
                os << "C q" << j << " m" << j << " " << cc << "\n";
                os << "C m" << j << " gnd " << cg << "\n";
            }
            os << "X m1 m2 m3 phi=" << phi << " R=" << r << "\n";
            for (int j = 1; j <= 3; ++j)
                os << "port J" << j << " q" << j << " gnd EJ=" << ej
                   << "GHz CJ=" << cj << "\n";
            closed = circulator_capacitive_closed_form(cj, cc, cg, r, phi);
            break;
        }
        case ExampleName::CirculatorResonator: {
            double cj = get(params, "cj_ff") * 1e-15;
            double cjr = get(params, "cjr_ff") * 1e-15;
            double cg = get(params, "cg_ff") * 1e-15;
            double crs = get(params, "crs_ff") * 1e-15;
            double wr = ghz_to_radps(get(params, "fr_ghz"));
            double zr = get(params, "zr_ohm");
            double r = get(params, "r_ohm");
            double phi = get(params, "phi_rad");
            double ej = get(params, "ej_ghz");
            for (int j = 1; j <= 3; ++j) {
                os << "C q" << j << " r" << j << " " << cjr << "\n";
                os << "C r" << j << " gnd " << 1.0 / (zr * wr) << "\n";
                os << "L r" << j << " gnd " << zr / wr << "\n";
                os << "C r" << j << " m" << j << " " << crs << "\n";
                if (cg > 0.0) os << "C m" << j << " gnd " << cg << "\n";
            }
            os << "X m1 m2 m3 phi=" << phi << " R=" << r << "\n";
            for (int j = 1; j <= 3; ++j)
                os << "port J" << j << " q" << j << " gnd EJ=" << ej
                   << "GHz CJ=" << cj << "\n";
            break;
        }
        case ExampleName::Isolator: {
            double cj = get(params, "cj_ff") * 1e-15;
            double cc = get(params, "cc_over_cj") * cj;
            double cg = get(params, "cg_over_cc") * cc;
            double cd = get(params, "cd_over_cc") * cc;
            double r = get(params, "r_ohm");
            double z0 = get(params, "z0_over_r") * r;
            double phi = get(params, "phi_rad");
            double ej = get(params, "ej_ghz");
            for (int j = 1; j <= 3; ++j) {
                os << "C q" << j << " m" << j << " " << cc << "\n";
                os << "C m" << j << " gnd " << cg << "\n";
            }
            os << "X m1 m2 m3 phi=" << phi << " R=" << r << "\n";
            os << "C q3 gnd " << cd << "\n";
            for (int j = 1; j <= 2; ++j)
                os << "port J" << j << " q" << j << " gnd EJ=" << ej
                   << "GHz CJ=" << cj << "\n";
            os << "port D3 q3 gnd Z0=" << z0 << "\n";
            break;
        }
    }
    BuiltExample out{parse(os.str()), std::move(closed)};
    return out;
}

}  // namespace imqed
