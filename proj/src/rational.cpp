#include "wick/rational.hpp"

namespace wick {

std::string rational_str(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string GaussianRational::str() const {
    if (im == 0) return rational_str(re);
    std::string s;
    if (re != 0) s = rational_str(re) + (im > 0 ? "+" : "");
    return s + rational_str(im) + "i";
}

mpq_class parse_rational(const std::string& s) {
    if (s.empty()) throw ConfigError("empty rational literal");
    try {
        mpq_class q(s);
        if (q.get_den() == 0) throw ConfigError("zero denominator in rational literal: '" + s + "'");
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw ConfigError("malformed rational literal: '" + s + "'");
    }
}

} // namespace wick
