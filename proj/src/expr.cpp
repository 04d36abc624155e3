#include "expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "errors.hpp"

namespace sepkern {

namespace {

struct Parser {
    const std::string& s;
    const std::map<std::string, double>& env;
    size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw ParseError("expression '" + s + "': " + what + " at offset " +
                         std::to_string(pos));
    }

    double atom() {
        skip();
        if (pos >= s.size()) fail("unexpected end");
        const char c = s[pos];
        if (c == '(') {
            ++pos;
            const double v = sum();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (c == '-') {
            ++pos;
            return -atom();
        }
        if (c == '+') {
            ++pos;
            return atom();
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            const double v = std::strtod(s.c_str() + pos, &end);
            if (end == s.c_str() + pos) fail("bad number");
            pos = static_cast<size_t>(end - s.c_str());
            return v;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            const std::string name = s.substr(start, pos - start);
            if (name == "pi") return M_PI;
            if (name == "ln2") return std::log(2.0);
            auto it = env.find(name);
            if (it == env.end()) fail("unknown name '" + name + "'");
            return it->second;
        }
        fail("unexpected character");
    }

    double pow_term() {
        const double base = atom();
        skip();
        if (pos < s.size() && s[pos] == '^') {
            ++pos;
            const double e = pow_term();  // right associative
            return std::pow(base, e);
        }
        return base;
    }

    double product() {
        double v = pow_term();
        for (;;) {
            skip();
            if (pos < s.size() && s[pos] == '*') {
                ++pos;
                v *= pow_term();
            } else if (pos < s.size() && s[pos] == '/') {
                ++pos;
                const double d = pow_term();
                v /= d;
            } else {
                return v;
            }
        }
    }

    double sum() {
        double v = product();
        for (;;) {
            skip();
            if (pos < s.size() && s[pos] == '+') {
                ++pos;
                v += product();
            } else if (pos < s.size() && s[pos] == '-') {
                ++pos;
                v -= product();
            } else {
                return v;
            }
        }
    }
};

} // namespace

double eval_expr(const std::string& expr, const std::map<std::string, double>& env) {
    Parser p{expr, env};
    const double v = p.sum();
    p.skip();
    if (p.pos != expr.size()) p.fail("trailing input");
    if (!std::isfinite(v))
        throw ArgumentError("expression '" + expr + "' evaluated to a non-finite value");
    return v;
}

} // namespace sepkern
