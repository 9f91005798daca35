#include "tmas/mitl.hpp"

#include "tmas/error.hpp"

#include <algorithm>
#include <cctype>

namespace tmas {

Interval make_interval(const Rational& lo, std::optional<Rational> hi)
{
    if (lo < Rational(0)) fail(ErrorCode::EmptyInterval, "interval lower bound must be nonnegative");
    if (hi && !(lo < *hi)) {
        fail(ErrorCode::EmptyInterval, "interval [" + to_decimal_string(lo) + "," + to_decimal_string(*hi) + "] is empty or singular");
    }
    return Interval{lo, hi};
}

namespace {

FormulaPtr node(Op op, std::string atom, Interval i, FormulaPtr lhs, FormulaPtr rhs)
{
    auto f = std::make_shared<Formula>();
    f->op = op;
    f->atom = std::move(atom);
    f->interval = i;
    f->lhs = std::move(lhs);
    f->rhs = std::move(rhs);
    return f;
}

}  // namespace

FormulaPtr atom(std::string p)
{
    if (p.empty()) fail(ErrorCode::SyntaxError, "empty proposition name");
    return node(Op::Atom, std::move(p), {}, nullptr, nullptr);
}

FormulaPtr negation(FormulaPtr f) { return node(Op::Not, {}, {}, std::move(f), nullptr); }
FormulaPtr conjunction(FormulaPtr a, FormulaPtr b) { return node(Op::And, {}, {}, std::move(a), std::move(b)); }
FormulaPtr disjunction(FormulaPtr a, FormulaPtr b) { return negation(conjunction(negation(std::move(a)), negation(std::move(b)))); }
FormulaPtr implication(FormulaPtr a, FormulaPtr b) { return negation(conjunction(std::move(a), negation(std::move(b)))); }
FormulaPtr next(Interval i, FormulaPtr f) { return node(Op::Next, {}, i, std::move(f), nullptr); }
FormulaPtr eventually(Interval i, FormulaPtr f) { return node(Op::Eventually, {}, i, std::move(f), nullptr); }
FormulaPtr always(Interval i, FormulaPtr f) { return node(Op::Always, {}, i, std::move(f), nullptr); }
FormulaPtr until(Interval i, FormulaPtr a, FormulaPtr b) { return node(Op::Until, {}, i, std::move(a), std::move(b)); }

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    FormulaPtr parse()
    {
        FormulaPtr f = implication_level();
        skip();
        if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
        return f;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void error(const std::string& msg) const
    {
        fail(ErrorCode::SyntaxError, msg + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(std::string_view tok)
    {
        skip();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    /// Operator letter directly followed (modulo spaces) by '['.
    bool eat_operator(char letter)
    {
        skip();
        if (pos_ >= s_.size() || s_[pos_] != letter) return false;
        std::size_t k = pos_ + 1;
        while (k < s_.size() && std::isspace(static_cast<unsigned char>(s_[k]))) ++k;
        if (k >= s_.size() || s_[k] != '[') return false;
        pos_ = k;
        return true;
    }

    Interval interval()
    {
        if (!eat("[")) error("expected '['");
        skip();
        std::size_t comma = s_.find(',', pos_);
        if (comma == std::string_view::npos) error("expected ','");
        std::size_t close = s_.find(']', comma);
        if (close == std::string_view::npos) error("expected ']'");
        auto trim = [](std::string_view v) {
            while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
            while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
            return v;
        };
        std::string_view lo = trim(s_.substr(pos_, comma - pos_));
        std::string_view hi = trim(s_.substr(comma + 1, close - comma - 1));
        pos_ = close + 1;
        std::optional<Rational> upper;
        if (hi != "inf") upper = parse_rational(hi);
        return make_interval(parse_rational(lo), upper);
    }

    FormulaPtr implication_level()
    {
        FormulaPtr lhs = or_level();
        if (eat("->")) return implication(lhs, implication_level());
        return lhs;
    }

    FormulaPtr or_level()
    {
        FormulaPtr f = and_level();
        while (true) {
            skip();
            if (pos_ < s_.size() && s_[pos_] == '|') {
                ++pos_;
                f = disjunction(f, and_level());
            } else {
                return f;
            }
        }
    }

    FormulaPtr and_level()
    {
        FormulaPtr f = until_level();
        while (eat("&")) f = conjunction(f, until_level());
        return f;
    }

    FormulaPtr until_level()
    {
        FormulaPtr lhs = unary();
        if (eat_operator('U')) {
            Interval i = interval();
            return until(i, lhs, until_level());
        }
        return lhs;
    }

    FormulaPtr unary()
    {
        skip();
        if (eat("!")) return negation(unary());
        if (eat_operator('X')) {
            Interval i = interval();
            return next(i, unary());
        }
        if (eat_operator('F')) {
            Interval i = interval();
            return eventually(i, unary());
        }
        if (eat_operator('G')) {
            Interval i = interval();
            return always(i, unary());
        }
        if (eat("(")) {
            FormulaPtr f = implication_level();
            if (!eat(")")) error("expected ')'");
            return f;
        }
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        if (start == pos_) error(pos_ < s_.size() ? "unexpected '" + std::string(1, s_[pos_]) + "'" : "unexpected end of formula");
        if (std::isdigit(static_cast<unsigned char>(s_[start]))) error("proposition names must not start with a digit");
        return atom(std::string(s_.substr(start, pos_ - start)));
    }
};

std::string interval_text(const Interval& i)
{
    return "[" + to_decimal_string(i.lo) + "," + (i.hi ? to_decimal_string(*i.hi) : std::string("inf")) + "]";
}

}  // namespace

FormulaPtr parse_formula(std::string_view text)
{
    return Parser(text).parse();
}

std::string to_string(const Formula& f)
{
    switch (f.op) {
    case Op::Atom: return f.atom;
    case Op::Not: return "!" + to_string(*f.lhs);
    case Op::And: return "(" + to_string(*f.lhs) + " & " + to_string(*f.rhs) + ")";
    case Op::Next: return "X" + interval_text(f.interval) + " " + to_string(*f.lhs);
    case Op::Eventually: return "F" + interval_text(f.interval) + " " + to_string(*f.lhs);
    case Op::Always: return "G" + interval_text(f.interval) + " " + to_string(*f.lhs);
    case Op::Until: return "(" + to_string(*f.lhs) + " U" + interval_text(f.interval) + " " + to_string(*f.rhs) + ")";
    }
    return {};
}

bool equal(const Formula& a, const Formula& b)
{
    if (a.op != b.op) return false;
    switch (a.op) {
    case Op::Atom: return a.atom == b.atom;
    case Op::Not: return equal(*a.lhs, *b.lhs);
    case Op::And: return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    case Op::Next:
    case Op::Eventually:
    case Op::Always: return a.interval == b.interval && equal(*a.lhs, *b.lhs);
    case Op::Until: return a.interval == b.interval && equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    }
    return false;
}

PropSet atoms(const Formula& f)
{
    if (f.op == Op::Atom) return {f.atom};
    PropSet out = atoms(*f.lhs);
    if (f.rhs) {
        PropSet r = atoms(*f.rhs);
        out.insert(r.begin(), r.end());
    }
    return out;
}

std::size_t depth(const Formula& f)
{
    if (f.op == Op::Atom) return 0;
    std::size_t d = depth(*f.lhs);
    if (f.rhs) d = std::max(d, depth(*f.rhs));
    return d + 1;
}

bool is_boolean(const Formula& f)
{
    switch (f.op) {
    case Op::Atom: return true;
    case Op::Not: return is_boolean(*f.lhs);
    case Op::And: return is_boolean(*f.lhs) && is_boolean(*f.rhs);
    default: return false;
    }
}

bool holds(const Formula& f, const PropSet& letter)
{
    switch (f.op) {
    case Op::Atom: return letter.count(f.atom) > 0;
    case Op::Not: return !holds(*f.lhs, letter);
    case Op::And: return holds(*f.lhs, letter) && holds(*f.rhs, letter);
    default: fail(ErrorCode::InvalidArgument, "temporal operator in a letter formula");
    }
}

namespace {

/// Scans unrolled positions j >= i in increasing order while `visit` returns
/// true. The scan stops once the elapsed time passes the interval, or, for
/// unbounded intervals, once every residue of the cycle has been seen past
/// the lower bound; periodicity makes later positions redundant.
template <class Visit>
void scan(const TimedWord& w, std::size_t i, const Interval& iv, Visit visit)
{
    const Rational t0 = w.time(i);
    const std::size_t p = w.cycle_length();
    std::size_t first_in = 0;
    bool have_first = false;
    for (std::size_t j = i;; ++j) {
        const Rational d = w.time(j) - t0;
        if (iv.hi && d > *iv.hi) return;
        if (!iv.hi) {
            if (!have_first && d >= iv.lo) {
                have_first = true;
                first_in = j;
            }
            if (have_first && j >= std::max(first_in, w.loop_start) + p) return;
        }
        if (!visit(j, d)) return;
    }
}

std::vector<bool> eval(const TimedWord& w, const Formula& f)
{
    const std::size_t n = w.size();
    std::vector<bool> out(n, false);
    switch (f.op) {
    case Op::Atom:
        for (std::size_t k = 0; k < n; ++k) out[k] = w.steps[k].value.count(f.atom) > 0;
        break;
    case Op::Not: {
        auto a = eval(w, *f.lhs);
        for (std::size_t k = 0; k < n; ++k) out[k] = !a[k];
        break;
    }
    case Op::And: {
        auto a = eval(w, *f.lhs);
        auto b = eval(w, *f.rhs);
        for (std::size_t k = 0; k < n; ++k) out[k] = a[k] && b[k];
        break;
    }
    case Op::Next: {
        auto a = eval(w, *f.lhs);
        for (std::size_t k = 0; k < n; ++k) out[k] = a[w.canonical(k + 1)] && f.interval.contains(w.time(k + 1) - w.time(k));
        break;
    }
    case Op::Eventually: {
        auto a = eval(w, *f.lhs);
        for (std::size_t k = 0; k < n; ++k) {
            bool found = false;
            scan(w, k, f.interval, [&](std::size_t j, const Rational& d) {
                if (d >= f.interval.lo && a[w.canonical(j)]) found = true;
                return !found;
            });
            out[k] = found;
        }
        break;
    }
    case Op::Always: {
        auto a = eval(w, *f.lhs);
        for (std::size_t k = 0; k < n; ++k) {
            bool ok = true;
            scan(w, k, f.interval, [&](std::size_t j, const Rational& d) {
                if (d >= f.interval.lo && !a[w.canonical(j)]) ok = false;
                return ok;
            });
            out[k] = ok;
        }
        break;
    }
    case Op::Until: {
        auto a = eval(w, *f.lhs);
        auto b = eval(w, *f.rhs);
        for (std::size_t k = 0; k < n; ++k) {
            bool found = false;
            scan(w, k, f.interval, [&](std::size_t j, const Rational& d) {
                const std::size_t c = w.canonical(j);
                if (d >= f.interval.lo && b[c]) {
                    found = true;
                    return false;
                }
                return static_cast<bool>(a[c]);
            });
            out[k] = found;
        }
        break;
    }
    }
    return out;
}

}  // namespace

std::vector<bool> sat_positions(const TimedWord& w, const Formula& f)
{
    w.validate();
    return eval(w, f);
}

bool sat(const TimedWord& w, std::size_t i, const Formula& f)
{
    return sat_positions(w, f)[w.canonical(i)];
}

bool service_compliance(const TimedWord& traj_word, const ServiceWordSpec& spec)
{
    for (std::size_t j = 0; j < spec.choices.size(); ++j) {
        const ServiceChoice& c = spec.choices[j];
        if (j == 0 && c.index != 0) return false;
        if (j > 0 && c.index <= spec.choices[j - 1].index) return false;
        const PropSet& offered = traj_word.value(c.index);
        if (!std::includes(offered.begin(), offered.end(), c.services.begin(), c.services.end())) return false;
        if (c.time < traj_word.time(c.index) || !(c.time < traj_word.time(c.index + 1))) return false;
    }
    return true;
}

}  // namespace tmas
