#include "tmas/common.hpp"

#include "tmas/error.hpp"

namespace tmas {

std::string format_props(const PropSet& props)
{
    std::string out = "{";
    bool first = true;
    for (const std::string& p : props) {
        if (!first) out += ',';
        out += p;
        first = false;
    }
    return out + "}";
}

PropSet parse_props(const std::string& text)
{
    std::size_t b = text.find_first_not_of(" \t");
    std::size_t e = text.find_last_not_of(" \t");
    if (b == std::string::npos || text[b] != '{' || text[e] != '}') fail(ErrorCode::SyntaxError, "bad label set '" + text + "'");
    PropSet out;
    std::string cur;
    for (std::size_t k = b + 1; k < e; ++k) {
        char c = text[k];
        if (c == ',') {
            if (cur.empty()) fail(ErrorCode::SyntaxError, "empty proposition in '" + text + "'");
            out.insert(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.insert(cur);
    return out;
}

}  // namespace tmas
