#pragma once

#include <ecidpda/ecidpda.hpp>

#include <string>
#include <vector>

namespace test {

using namespace ecidpda;

inline Rational q(const char* text) { return parse_rational(text); }

inline PartitionedAlphabet example_alphabet() { return PartitionedAlphabet({"<"}, {">"}, {"c", "d"}); }

// c < < c > > d at 0.1 0.2 0.4 0.5 0.7 0.8 1
inline TimedString example_string()
{
    return make_timed_string(example_alphabet(), {"c", "<", "<", "c", ">", ">", "d"},
                             {q("0.1"), q("0.2"), q("0.4"), q("0.5"), q("0.7"), q("0.8"), q("1")});
}

inline TimedString untimed(const PartitionedAlphabet& alphabet, const std::vector<std::string>& symbols)
{
    std::vector<Rational> times;
    for (std::size_t i = 0; i < symbols.size(); ++i)
        times.emplace_back(static_cast<long long>(i + 1));
    return make_timed_string(alphabet, symbols, times);
}

} // namespace test
