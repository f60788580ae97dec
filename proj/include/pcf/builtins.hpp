#pragma once
// The two worked structures: the Sierpinski gasket and the unit interval.
#include <string>

#include "pcf/operator.hpp"
#include "pcf/poly.hpp"

namespace pcf {

inline StructureSpec gasket_spec() {
    StructureSpec s;
    s.name = "gasket";
    s.N = 3;
    s.N0 = 3;
    s.relation = {{0, 1, 1, 0}, {0, 2, 2, 0}, {1, 2, 2, 1}};
    s.group = {{0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}, {1, 2, 0}, {2, 0, 1}};
    s.alpha.assign(3, Weight(mpq_class(1)));
    s.beta.assign(3, Weight(mpq_class(1)));
    return s;
}

inline BaseOperator gasket_base() {
    return BaseOperator::from_conductances(3, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}}, {1, 1, 1});
}

inline StructureSpec interval_spec(const mpq_class& alpha) {
    if (alpha <= 0 || alpha >= 1) throw ConfigError("interval parameter must lie in (0,1)");
    StructureSpec s;
    s.name = "interval:" + alpha.get_str();
    s.N = 2;
    s.N0 = 2;
    s.relation = {{0, 1, 1, 0}};
    s.group = {{0, 1}};
    s.alpha = {Weight(alpha), Weight(mpq_class(1 - alpha))};
    s.beta = {Weight(mpq_class(1 - alpha)), Weight(alpha)};
    return s;
}

inline BaseOperator interval_base() { return BaseOperator::from_conductances(2, {{0, 1, 1}}, {1, 1}); }

struct Builtin {
    StructureSpec spec;
    BaseOperator base;
};

// "gasket" or "interval:<rational>", e.g. "interval:1/3".
inline Builtin builtin(const std::string& name) {
    if (name == "gasket") return {gasket_spec(), gasket_base()};
    if (name.rfind("interval", 0) == 0) {
        mpq_class a(1, 2);
        if (name.size() > 8) {
            if (name[8] != ':') throw ConfigError("unknown builtin: " + name);
            a = parse_rational(name.substr(9));
        }
        return {interval_spec(a), interval_base()};
    }
    throw ConfigError("unknown builtin: " + name);
}

} // namespace pcf
