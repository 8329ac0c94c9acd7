#include "horn/symbol.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <tuple>
#include <unordered_map>

namespace horn {
namespace {

void check_index(int i) {
    if (i < 0 || i >= kDim) throw IndexError("index out of range 0..3: " + std::to_string(i));
}

JetSymbol with_sorted(JetSymbol s, const std::vector<int>& d, std::size_t max_len) {
    if (d.size() > max_len) throw IndexError("too many derivative indices");
    std::vector<int> sorted = d;
    std::sort(sorted.begin(), sorted.end());
    s.n = static_cast<std::uint8_t>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        check_index(sorted[i]);
        s.idx[i] = static_cast<std::uint8_t>(sorted[i]);
    }
    return s;
}

std::string digits(const JetSymbol& s, int from, int to) {
    std::string out;
    for (int i = from; i < to; ++i) out += static_cast<char>('0' + s.idx[i]);
    return out;
}

struct SymHash {
    std::size_t operator()(const JetSymbol& s) const { return s.content_hash(); }
};

struct Table {
    std::mutex mu;
    std::deque<JetSymbol> symbols;
    std::unordered_map<JetSymbol, SymId, SymHash> ids;
};

Table& table() {
    static Table t;
    return t;
}

}  // namespace

JetSymbol JetSymbol::coord(int mu) {
    check_index(mu);
    JetSymbol s;
    s.kind = SymKind::Coord;
    s.n = 1;
    s.idx[0] = static_cast<std::uint8_t>(mu);
    return s;
}

JetSymbol JetSymbol::metric(int a, int b, std::initializer_list<int> derivs) {
    return metric(a, b, std::vector<int>(derivs));
}

JetSymbol JetSymbol::metric(int a, int b, const std::vector<int>& derivs) {
    check_index(a);
    check_index(b);
    JetSymbol s;
    s.kind = SymKind::Metric;
    s.a = static_cast<std::uint8_t>(std::min(a, b));
    s.b = static_cast<std::uint8_t>(std::max(a, b));
    return with_sorted(s, derivs, kMaxJetOrder);
}

JetSymbol JetSymbol::inv_metric(int a, int b) {
    check_index(a);
    check_index(b);
    JetSymbol s;
    s.kind = SymKind::InvMetric;
    s.a = static_cast<std::uint8_t>(std::min(a, b));
    s.b = static_cast<std::uint8_t>(std::max(a, b));
    return s;
}

JetSymbol JetSymbol::sqrt_det() {
    JetSymbol s;
    s.kind = SymKind::SqrtDet;
    return s;
}

JetSymbol JetSymbol::phi(std::initializer_list<int> derivs) { return phi(std::vector<int>(derivs)); }

JetSymbol JetSymbol::phi(const std::vector<int>& derivs) {
    JetSymbol s;
    s.kind = SymKind::PhiPartial;
    return with_sorted(s, derivs, kMaxJetOrder);
}

JetSymbol JetSymbol::phi_cov(const std::vector<int>& derivs) {
    if (derivs.size() <= 1) return phi(derivs);
    if (derivs.size() > 3) throw IndexError("covariant scalar jets stop at order 3");
    JetSymbol s;
    s.kind = SymKind::PhiCov;
    return with_sorted(s, derivs, 3);
}

JetSymbol JetSymbol::p() {
    JetSymbol s;
    s.kind = SymKind::P;
    return s;
}

JetSymbol JetSymbol::pg1(int a, int b, int mu) {
    JetSymbol s = metric(a, b);
    s.kind = SymKind::PgFirst;
    return with_sorted(s, {mu}, 1);
}

JetSymbol JetSymbol::pg2(int a, int b, int mu, int nu) {
    JetSymbol s = metric(a, b);
    s.kind = SymKind::PgSecond;
    return with_sorted(s, {mu, nu}, 2);
}

JetSymbol JetSymbol::pphi1(int mu) {
    JetSymbol s;
    s.kind = SymKind::PphiFirst;
    return with_sorted(s, {mu}, 1);
}

JetSymbol JetSymbol::pphi2(int mu, int nu) {
    JetSymbol s;
    s.kind = SymKind::PphiSecond;
    return with_sorted(s, {mu, nu}, 2);
}

JetSymbol JetSymbol::coeff(CoeffFamily f, int a, int b, const std::vector<int>& indices) {
    JetSymbol s;
    s.kind = SymKind::Coeff;
    s.family = static_cast<std::uint8_t>(f);
    check_index(a);
    check_index(b);
    s.a = static_cast<std::uint8_t>(std::min(a, b));
    s.b = static_cast<std::uint8_t>(std::max(a, b));
    if (indices.empty() || indices.size() > 4) throw IndexError("coefficient needs 1..4 indices");
    // The last index is the multivector slot tau; the leading ones form a symmetric group.
    std::vector<int> lead(indices.begin(), indices.end() - 1);
    std::sort(lead.begin(), lead.end());
    lead.push_back(indices.back());
    s.n = static_cast<std::uint8_t>(lead.size());
    for (std::size_t i = 0; i < lead.size(); ++i) {
        check_index(lead[i]);
        s.idx[i] = static_cast<std::uint8_t>(lead[i]);
    }
    return s;
}

int JetSymbol::order() const {
    switch (kind) {
        case SymKind::Metric:
        case SymKind::PhiPartial:
        case SymKind::PhiCov:
            return n;
        default:
            return 0;
    }
}

bool JetSymbol::is_momentum() const {
    switch (kind) {
        case SymKind::P:
        case SymKind::PgFirst:
        case SymKind::PgSecond:
        case SymKind::PphiFirst:
        case SymKind::PphiSecond:
            return true;
        default:
            return false;
    }
}

std::string JetSymbol::str() const {
    std::string pair = {static_cast<char>('0' + a), static_cast<char>('0' + b)};
    switch (kind) {
        case SymKind::Coord:
            return "x^" + digits(*this, 0, 1);
        case SymKind::Metric:
            return n == 0 ? "g_{" + pair + "}" : "g_{" + pair + "," + digits(*this, 0, n) + "}";
        case SymKind::InvMetric:
            return "g^{" + pair + "}";
        case SymKind::SqrtDet:
            return "sqrtg";
        case SymKind::PhiPartial:
            return n == 0 ? "phi" : "phi_{," + digits(*this, 0, n) + "}";
        case SymKind::PhiCov:
            return "phi_{;" + digits(*this, 0, n) + "}";
        case SymKind::P:
            return "p";
        case SymKind::PgFirst:
        case SymKind::PgSecond:
            return "pg^{" + pair + "," + digits(*this, 0, n) + "}";
        case SymKind::PphiFirst:
        case SymKind::PphiSecond:
            return "pphi^{," + digits(*this, 0, n) + "}";
        case SymKind::Coeff: {
            static const char* names[] = {"Fg", "Fphi", "Fg1", "Fphi1", "Gg1", "Gphi1", "Gg2", "Gphi2", "Fg4", "Fphi4"};
            std::string head = names[family];
            auto fam = static_cast<CoeffFamily>(family);
            bool metric_like = fam == CoeffFamily::MetricVelocity || fam == CoeffFamily::MetricAcceleration ||
                               fam == CoeffFamily::MetricMomentum1 || fam == CoeffFamily::MetricMomentum2 ||
                               fam == CoeffFamily::MetricFourth;
            std::string body = metric_like ? pair + "," : std::string(",");
            return head + "[" + body + digits(*this, 0, n - 1) + "|" + digits(*this, n - 1, n) + "]";
        }
    }
    return "?";
}

std::string JetSymbol::latex() const {
    std::string pair = {static_cast<char>('0' + a), static_cast<char>('0' + b)};
    switch (kind) {
        case SymKind::Coord:
            return "x^{" + digits(*this, 0, 1) + "}";
        case SymKind::Metric:
            return n == 0 ? "g_{" + pair + "}" : "g_{" + pair + "," + digits(*this, 0, n) + "}";
        case SymKind::InvMetric:
            return "g^{" + pair + "}";
        case SymKind::SqrtDet:
            return "\\sqrt{-g}";
        case SymKind::PhiPartial:
            return n == 0 ? "\\phi" : "\\phi_{," + digits(*this, 0, n) + "}";
        case SymKind::PhiCov:
            return "\\phi_{;" + digits(*this, 0, n) + "}";
        case SymKind::P:
            return "p";
        case SymKind::PgFirst:
        case SymKind::PgSecond:
            return "p_g^{" + pair + "," + digits(*this, 0, n) + "}";
        case SymKind::PphiFirst:
        case SymKind::PphiSecond:
            return "p_\\phi^{," + digits(*this, 0, n) + "}";
        case SymKind::Coeff:
            return "\\mathrm{" + str() + "}";
    }
    return "?";
}

std::uint64_t JetSymbol::content_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h *= 0x100000001b3ULL;
    };
    mix(static_cast<std::uint64_t>(kind));
    mix(a);
    mix(b);
    mix(n);
    for (auto v : idx) mix(v);
    mix(family);
    return h;
}

bool operator<(const JetSymbol& x, const JetSymbol& y) {
    return std::tie(x.kind, x.family, x.n, x.a, x.b, x.idx) < std::tie(y.kind, y.family, y.n, y.a, y.b, y.idx);
}

SymId intern(const JetSymbol& s) {
    Table& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    auto it = t.ids.find(s);
    if (it != t.ids.end()) return it->second;
    SymId id = static_cast<SymId>(t.symbols.size());
    t.symbols.push_back(s);
    t.ids.emplace(s, id);
    return id;
}

const JetSymbol& symbol_of(SymId id) {
    Table& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    return t.symbols.at(id);
}

std::size_t interned_symbol_count() {
    Table& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    return t.symbols.size();
}

std::vector<std::pair<int, int>> ordered_pairs() {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < kDim; ++a)
        for (int b = a; b < kDim; ++b) out.emplace_back(a, b);
    return out;
}

std::vector<std::vector<int>> multisets(int size) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == size) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i < kDim; ++i) {
            cur.push_back(i);
            self(self, i);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

std::vector<JetSymbol> metric_coordinates(int order) {
    std::vector<JetSymbol> out;
    for (auto [a, b] : ordered_pairs())
        for (const auto& d : multisets(order)) out.push_back(JetSymbol::metric(a, b, d));
    return out;
}

std::vector<JetSymbol> scalar_coordinates(int order, bool covariant) {
    std::vector<JetSymbol> out;
    for (const auto& d : multisets(order)) out.push_back(covariant ? JetSymbol::phi_cov(d) : JetSymbol::phi(d));
    return out;
}

}  // namespace horn
