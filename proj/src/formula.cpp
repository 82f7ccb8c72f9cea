// ============================================================================
// formula.cpp — AST factories, parser, printer, closure, transformations
// ============================================================================

#include "mtl/formula.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <utility>

namespace mtl {

// ============================================================================
// Factories and basic predicates
// ============================================================================

FormulaPtr make_prop(std::string name) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Prop;
    f->name = std::move(name);
    return f;
}

FormulaPtr make_neg(FormulaPtr child) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Neg;
    f->left = std::move(child);
    return f;
}

FormulaPtr make_or(FormulaPtr l, FormulaPtr r) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Or;
    f->left = std::move(l);
    f->right = std::move(r);
    return f;
}

FormulaPtr make_future(FormulaPtr child) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Future;
    f->left = std::move(child);
    return f;
}

FormulaPtr make_past(FormulaPtr child) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Past;
    f->left = std::move(child);
    return f;
}

FormulaPtr make_and(FormulaPtr l, FormulaPtr r) {
    return make_neg(make_or(make_neg(std::move(l)), make_neg(std::move(r))));
}

FormulaPtr make_implies(FormulaPtr l, FormulaPtr r) {
    return make_or(make_neg(std::move(l)), std::move(r));
}

FormulaPtr make_always(FormulaPtr f) {
    return make_neg(make_future(make_neg(std::move(f))));
}

FormulaPtr make_hist(FormulaPtr f) {
    return make_neg(make_past(make_neg(std::move(f))));
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case Kind::Prop:
            return a->name == b->name;
        case Kind::Neg:
        case Kind::Future:
        case Kind::Past:
            return equal(a->left, b->left);
        case Kind::Or:
            return equal(a->left, b->left) && equal(a->right, b->right);
    }
    return false;
}

bool is_normalized(const FormulaPtr& f) {
    if (!f) return false;
    switch (f->kind) {
        case Kind::Prop:
            return true;
        case Kind::Neg:
            return f->left->kind != Kind::Neg && is_normalized(f->left);
        case Kind::Future:
        case Kind::Past:
            return is_normalized(f->left);
        case Kind::Or:
            return is_normalized(f->left) && is_normalized(f->right);
    }
    return false;
}

std::size_t formula_size(const FormulaPtr& f) {
    if (!f) return 0;
    switch (f->kind) {
        case Kind::Prop:
            return 1;
        case Kind::Neg:
        case Kind::Future:
        case Kind::Past:
            return 1 + formula_size(f->left);
        case Kind::Or:
            return 1 + formula_size(f->left) + formula_size(f->right);
    }
    return 0;
}

FormulaPtr normalize(FormulaPtr f) {
    switch (f->kind) {
        case Kind::Prop:
            return f;
        case Kind::Neg: {
            FormulaPtr c = normalize(f->left);
            if (c->kind == Kind::Neg) return c->left;
            if (c.get() == f->left.get()) return f;
            return make_neg(std::move(c));
        }
        case Kind::Future: {
            FormulaPtr c = normalize(f->left);
            if (c.get() == f->left.get()) return f;
            return make_future(std::move(c));
        }
        case Kind::Past: {
            FormulaPtr c = normalize(f->left);
            if (c.get() == f->left.get()) return f;
            return make_past(std::move(c));
        }
        case Kind::Or: {
            FormulaPtr l = normalize(f->left);
            FormulaPtr r = normalize(f->right);
            if (l.get() == f->left.get() && r.get() == f->right.get()) return f;
            return make_or(std::move(l), std::move(r));
        }
    }
    return f;
}

// ============================================================================
// Printer
// ============================================================================

namespace {

void print_into(const FormulaPtr& f, std::string& out);

// Operands of unary connectives and right operands of | need parentheses
// exactly when they are disjunctions (| is the only remaining infix and is
// printed left-associatively).
void print_wrapped(const FormulaPtr& f, std::string& out) {
    if (f->kind == Kind::Or) {
        out += '(';
        print_into(f, out);
        out += ')';
    } else {
        print_into(f, out);
    }
}

void print_into(const FormulaPtr& f, std::string& out) {
    switch (f->kind) {
        case Kind::Prop:
            out += f->name;
            return;
        case Kind::Neg:
            out += '~';
            print_wrapped(f->left, out);
            return;
        case Kind::Future:
            out += 'F';
            print_wrapped(f->left, out);
            return;
        case Kind::Past:
            out += 'P';
            print_wrapped(f->left, out);
            return;
        case Kind::Or:
            print_into(f->left, out);
            out += '|';
            print_wrapped(f->right, out);
            return;
    }
}

}  // namespace

std::string print(const FormulaPtr& f) {
    std::string out;
    print_into(f, out);
    return out;
}

namespace {

void collect_props(const FormulaPtr& f, std::set<std::string>& out) {
    switch (f->kind) {
        case Kind::Prop:
            out.insert(f->name);
            return;
        case Kind::Neg:
        case Kind::Future:
        case Kind::Past:
            collect_props(f->left, out);
            return;
        case Kind::Or:
            collect_props(f->left, out);
            collect_props(f->right, out);
            return;
    }
}

}  // namespace

std::vector<std::string> props_in(const FormulaPtr& f) {
    std::set<std::string> names;
    collect_props(f, names);
    return std::vector<std::string>(names.begin(), names.end());
}

// ============================================================================
// Parser
// ============================================================================

ParseError::ParseError(const std::string& msg, std::size_t pos)
    : std::runtime_error("parse error at " + std::to_string(pos) + ": " + msg),
      position(pos) {}

namespace {

enum class Tok : std::uint8_t {
    Ident, True, False, Neg, And, Or, Arrow, LParen, RParen,
    ModF, ModP, ModG, ModH, End,
};

struct Token {
    Tok kind;
    std::string text;  // Ident only
    std::size_t pos;
};

bool is_ident_start(char c) { return c >= 'a' && c <= 'z'; }
bool is_ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_';
}

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        switch (c) {
            case '~': toks.push_back({Tok::Neg, "", start}); ++i; continue;
            case '&': toks.push_back({Tok::And, "", start}); ++i; continue;
            case '|': toks.push_back({Tok::Or, "", start}); ++i; continue;
            case '(': toks.push_back({Tok::LParen, "", start}); ++i; continue;
            case ')': toks.push_back({Tok::RParen, "", start}); ++i; continue;
            case '-':
                if (i + 1 < text.size() && text[i + 1] == '>') {
                    toks.push_back({Tok::Arrow, "", start});
                    i += 2;
                    continue;
                }
                throw ParseError("expected '->' after '-'", start);
            case 'F': toks.push_back({Tok::ModF, "", start}); ++i; continue;
            case 'P': toks.push_back({Tok::ModP, "", start}); ++i; continue;
            case 'G': toks.push_back({Tok::ModG, "", start}); ++i; continue;
            case 'H': toks.push_back({Tok::ModH, "", start}); ++i; continue;
            default: break;
        }
        if (is_ident_start(c)) {
            std::size_t j = i + 1;
            while (j < text.size() && is_ident_char(text[j])) ++j;
            std::string word = text.substr(i, j - i);
            i = j;
            if (word == "true") {
                toks.push_back({Tok::True, "", start});
            } else if (word == "false") {
                toks.push_back({Tok::False, "", start});
            } else {
                toks.push_back({Tok::Ident, std::move(word), start});
            }
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    toks.push_back({Tok::End, "", text.size()});
    return toks;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {
        for (const auto& t : toks_) {
            if (t.kind == Tok::Ident) used_idents_.insert(t.text);
        }
    }

    FormulaPtr run() {
        FormulaPtr f = parse_implies();
        if (peek().kind != Tok::End) {
            throw ParseError("unexpected trailing input", peek().pos);
        }
        return f;
    }

private:
    const Token& peek() const { return toks_[at_]; }
    Token take() { return toks_[at_++]; }

    // The constant encodings need a proposition that the input never uses;
    // "taut" with numeric suffixes is scanned until a free name is found.
    const std::string& witness_name() {
        if (witness_.empty()) {
            std::string candidate = "taut";
            int counter = 0;
            while (used_idents_.count(candidate) != 0) {
                candidate = "taut" + std::to_string(counter++);
            }
            witness_ = candidate;
        }
        return witness_;
    }

    FormulaPtr parse_implies() {
        FormulaPtr lhs = parse_or();
        if (peek().kind == Tok::Arrow) {
            take();
            return make_implies(std::move(lhs), parse_implies());
        }
        return lhs;
    }

    FormulaPtr parse_or() {
        FormulaPtr acc = parse_and();
        while (peek().kind == Tok::Or) {
            take();
            acc = make_or(std::move(acc), parse_and());
        }
        return acc;
    }

    FormulaPtr parse_and() {
        FormulaPtr acc = parse_unary();
        while (peek().kind == Tok::And) {
            take();
            acc = make_and(std::move(acc), parse_unary());
        }
        return acc;
    }

    FormulaPtr parse_unary() {
        const Token t = take();
        switch (t.kind) {
            case Tok::Neg: return make_neg(parse_unary());
            case Tok::ModF: return make_future(parse_unary());
            case Tok::ModP: return make_past(parse_unary());
            case Tok::ModG: return make_always(parse_unary());
            case Tok::ModH: return make_hist(parse_unary());
            case Tok::Ident: return make_prop(t.text);
            case Tok::True: {
                FormulaPtr w = make_prop(witness_name());
                return make_or(w, make_neg(w));
            }
            case Tok::False: {
                FormulaPtr w = make_prop(witness_name());
                return make_and(w, make_neg(w));
            }
            case Tok::LParen: {
                FormulaPtr inner = parse_implies();
                if (peek().kind != Tok::RParen) {
                    throw ParseError("expected ')'", peek().pos);
                }
                take();
                return inner;
            }
            case Tok::RParen:
                throw ParseError("unexpected ')'", t.pos);
            case Tok::And:
            case Tok::Or:
            case Tok::Arrow:
                throw ParseError("unexpected infix operator", t.pos);
            case Tok::End:
                throw ParseError("unexpected end of input", t.pos);
        }
        throw ParseError("unexpected token", t.pos);
    }

    std::vector<Token> toks_;
    std::size_t at_ = 0;
    std::set<std::string> used_idents_;
    std::string witness_;
};

}  // namespace

FormulaPtr parse(const std::string& text) {
    Parser parser(lex(text));
    return normalize(parser.run());
}

// ============================================================================
// ClosureSet
// ============================================================================

ClosureSet::ClosureSet(const FormulaPtr& f) {
    assert(is_normalized(f));
    root_ = add(f);
    for (std::uint32_t i = 0; i < items_.size(); ++i) {
        if (items_[i].kind != Kind::Or) free_items_.push_back(i);
    }
}

SignedRef ClosureSet::add(const FormulaPtr& f) {
    if (f->kind == Kind::Neg) {
        SignedRef r = add(f->left);
        return {r.index, !r.negated};
    }
    SignedRef left{};
    SignedRef right{};
    if (f->kind == Kind::Or) {
        left = add(f->left);
        right = add(f->right);
    } else if (f->kind == Kind::Future || f->kind == Kind::Past) {
        left = add(f->left);
    }
    std::string key = print(f);
    auto it = index_.find(key);
    if (it != index_.end()) {
        return {it->second, false};
    }
    const auto idx = static_cast<std::uint32_t>(items_.size());
    items_.push_back(ClosureItem{f->kind, f->kind == Kind::Prop ? f->name : "",
                                 left, right, f});
    index_.emplace(std::move(key), idx);
    return {idx, false};
}

std::optional<std::uint32_t> ClosureSet::find(const FormulaPtr& positive) const {
    auto it = index_.find(print(positive));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string ClosureSet::item_string(std::uint32_t i) const {
    return print(items_[i].formula);
}

std::string ClosureSet::literal_string(SignedRef r) const {
    if (r.negated) return print(make_neg(items_[r.index].formula));
    return item_string(r.index);
}

// ============================================================================
// Transformations
// ============================================================================

namespace {

FormulaPtr relativize_raw(const FormulaPtr& f, const FormulaPtr& guard) {
    switch (f->kind) {
        case Kind::Prop:
            return make_and(guard, f);
        case Kind::Neg:
            return make_and(guard, make_neg(relativize_raw(f->left, guard)));
        case Kind::Or:
            return make_or(relativize_raw(f->left, guard),
                           relativize_raw(f->right, guard));
        case Kind::Future:
            return make_and(guard, make_future(relativize_raw(f->left, guard)));
        case Kind::Past:
            return make_and(guard, make_past(relativize_raw(f->left, guard)));
    }
    return f;
}

}  // namespace

FormulaPtr relativize(const FormulaPtr& f, const std::string& prop) {
    const auto names = props_in(f);
    if (std::find(names.begin(), names.end(), prop) != names.end()) {
        throw std::invalid_argument("relativize: proposition '" + prop +
                                    "' occurs in the formula");
    }
    return normalize(relativize_raw(f, make_prop(prop)));
}

FormulaPtr reflexive_translate(const FormulaPtr& f) {
    switch (f->kind) {
        case Kind::Prop:
            return f;
        case Kind::Neg:
            return make_neg(reflexive_translate(f->left));
        case Kind::Or:
            return make_or(reflexive_translate(f->left),
                           reflexive_translate(f->right));
        case Kind::Future: {
            FormulaPtr c = reflexive_translate(f->left);
            return make_or(c, make_future(c));
        }
        case Kind::Past: {
            FormulaPtr c = reflexive_translate(f->left);
            return make_or(c, make_past(c));
        }
    }
    return f;
}

FormulaPtr time_reverse(const FormulaPtr& f) {
    switch (f->kind) {
        case Kind::Prop:
            return f;
        case Kind::Neg:
            return make_neg(time_reverse(f->left));
        case Kind::Or:
            return make_or(time_reverse(f->left), time_reverse(f->right));
        case Kind::Future:
            return make_past(time_reverse(f->left));
        case Kind::Past:
            return make_future(time_reverse(f->left));
    }
    return f;
}

namespace {

bool valid_prop_name(const std::string& name) {
    if (name.empty() || !(name[0] >= 'a' && name[0] <= 'z')) return false;
    if (name == "true" || name == "false") return false;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

}  // namespace

FormulaPtr delta(const FinitePoset& poset, bool plus) {
    const std::size_t n = poset.size();
    if (n == 0) {
        throw std::invalid_argument("delta: poset has no points");
    }
    std::vector<FormulaPtr> props;
    for (const auto& name : poset.points()) {
        if (!valid_prop_name(name)) {
            throw std::invalid_argument("delta: point name '" + name +
                                        "' is not a proposition identifier");
        }
        props.push_back(make_prop(name));
    }

    std::vector<FormulaPtr> conjuncts;

    // Some point holds.
    FormulaPtr some = props[0];
    for (std::size_t i = 1; i < n; ++i) some = make_or(some, props[i]);
    conjuncts.push_back(some);

    // At most one point holds.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            conjuncts.push_back(make_neg(make_and(props[i], props[j])));
        }
    }

    // Related pairs force witnesses in both directions.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || !poset.related(i, j)) continue;
            conjuncts.push_back(make_implies(props[i], make_future(props[j])));
            conjuncts.push_back(make_implies(props[j], make_past(props[i])));
        }
    }

    // Unrelated pairs exclude each other's futures/pasts.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || poset.related(i, j)) continue;
            conjuncts.push_back(
                make_implies(props[i], make_always(make_neg(props[j]))));
            conjuncts.push_back(
                make_implies(props[j], make_hist(make_neg(props[i]))));
        }
    }

    // Per-point loop conjuncts distinguish reflexive from irreflexive points.
    if (plus) {
        for (std::size_t i = 0; i < n; ++i) {
            if (poset.reflexive_point(i)) {
                conjuncts.push_back(make_implies(
                    props[i],
                    make_and(make_future(props[i]), make_past(props[i]))));
            } else {
                conjuncts.push_back(
                    make_implies(props[i], make_always(make_neg(props[i]))));
            }
        }
    }

    FormulaPtr body = conjuncts[0];
    for (std::size_t i = 1; i < conjuncts.size(); ++i) {
        body = make_and(std::move(body), conjuncts[i]);
    }
    return normalize(make_always(make_hist(std::move(body))));
}

const std::vector<std::string>& rho_reserved_props() {
    static const std::vector<std::string> reserved =
        square_poset().points();
    return reserved;
}

FormulaPtr rho_reduction(const FormulaPtr& f) {
    const auto& reserved = rho_reserved_props();
    for (const auto& name : props_in(f)) {
        if (std::find(reserved.begin(), reserved.end(), name) != reserved.end()) {
            throw std::invalid_argument(
                "containment reduction: formula uses reserved proposition '" +
                name + "'");
        }
    }
    return normalize(
        make_and(delta(square_poset(), true), relativize(f, "alpha")));
}

}  // namespace mtl
