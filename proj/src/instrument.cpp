#include "wr/instrument.hpp"

#include <sstream>
#include <stdexcept>
#include <vector>

#include "wr/types.hpp"

namespace wr {

void CapletSpec::check() const {
    if (!(T > 0.0)) throw structural_error("caplet expiry must be positive");
    if (!(delta > 0.0)) throw structural_error("caplet tenor must be positive");
    if (!(strike_factor() > 0.0)) throw structural_error("caplet needs 1 + delta K > 0");
}

void SwaptionSpec::check() const {
    if (!(T > 0.0)) throw structural_error("swaption expiry must be positive");
    if (m < 1) throw structural_error("swaption needs at least one period");
    if (!(delta > 0.0)) throw structural_error("swaption period must be positive");
}

namespace {

std::vector<double> split_numbers(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw structural_error("instrument field '" + item + "' is not a number");
        }
        if (used != item.size()) throw structural_error("instrument field '" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

}  // namespace

InstrumentSpec parse_instrument(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw structural_error("instrument must look like kind:fields");
    const std::string kind = text.substr(0, colon);
    const auto f = split_numbers(text.substr(colon + 1));
    if (kind == "caplet") {
        if (f.size() != 3) throw structural_error("caplet needs T,delta,K");
        CapletSpec c{f[0], f[1], f[2]};
        c.check();
        return c;
    }
    if (kind == "swaption") {
        if (f.size() != 4) throw structural_error("swaption needs T,m,delta,K");
        if (f[1] != static_cast<int>(f[1])) throw structural_error("swaption period count must be an integer");
        SwaptionSpec s{f[0], static_cast<int>(f[1]), f[2], f[3]};
        s.check();
        return s;
    }
    throw structural_error("unknown instrument kind '" + kind + "'");
}

std::string describe(const InstrumentSpec& spec) {
    std::ostringstream os;
    os.precision(9);
    if (const auto* c = std::get_if<CapletSpec>(&spec))
        os << "caplet:" << c->T << ',' << c->delta << ',' << c->K;
    else {
        const auto& s = std::get<SwaptionSpec>(spec);
        os << "swaption:" << s.T << ',' << s.m << ',' << s.delta << ',' << s.K;
    }
    return os.str();
}

}  // namespace wr
