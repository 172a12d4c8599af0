#include "nlcorpus/sigparse.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "nlcorpus/util.hpp"

namespace nlcorpus::sigparse {

namespace {

bool is_identifier(std::string_view s) {
    if (s.empty() || !is_ident_start(s[0])) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return is_word_char(c); });
}

bool is_dotted_identifier(std::string_view s) {
    std::size_t start = 0;
    while (true) {
        std::size_t dot = s.find('.', start);
        std::string_view part = s.substr(start, dot == std::string_view::npos ? dot : dot - start);
        if (!is_identifier(part)) return false;
        if (dot == std::string_view::npos) return true;
        start = dot + 1;
    }
}

std::string last_component(std::string_view dotted) {
    std::size_t dot = dotted.rfind('.');
    return std::string(dot == std::string_view::npos ? dotted : dotted.substr(dot + 1));
}

[[noreturn]] void malformed(std::string_view text, std::string_view why) {
    throw MalformedSignature("malformed signature \"" + std::string(text) + "\": " + std::string(why));
}

// Scans a default literal starting at `pos`. Stops at a ',' or ']' that is
// not nested inside the literal's own parens/brackets/braces/quotes.
std::size_t scan_default(std::string_view s, std::size_t pos, std::string_view text) {
    int paren = 0, bracket = 0, brace = 0;
    char quote = 0;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (quote) {
            if (c == '\\' && pos + 1 < s.size()) {
                ++pos;
            } else if (c == quote) {
                quote = 0;
            }
            continue;
        }
        switch (c) {
            case '\'':
            case '"': quote = c; break;
            case '(': ++paren; break;
            case ')':
                if (paren == 0) return pos;  // outer prototype paren
                --paren;
                break;
            case '[': ++bracket; break;
            case ']':
                if (bracket == 0) return pos;
                --bracket;
                break;
            case '{': ++brace; break;
            case '}': --brace; break;
            case ',':
                if (paren == 0 && bracket == 0 && brace == 0) return pos;
                break;
            default: break;
        }
    }
    if (quote) malformed(text, "unterminated string literal in default value");
    return pos;
}

} // namespace

std::vector<std::string> Signature::names_of(ArgKind kind) const {
    std::vector<std::string> out;
    for (const auto& a : args)
        if (a.kind == kind) out.push_back(a.name);
    return out;
}

const ArgSpec* Signature::find_arg(std::string_view name) const {
    for (const auto& a : args)
        if (a.name == name) return &a;
    return nullptr;
}

Signature parse_signature(std::string_view text, EntryKind entry_kind,
                          std::optional<std::string> class_name) {
    std::string s = trim(text);
    // Doc dumps sometimes keep the "class " prefix on constructor prototypes.
    if (s.rfind("class ", 0) == 0) s = trim(std::string_view(s).substr(6));

    std::size_t open = s.find('(');
    if (open == std::string::npos) malformed(text, "missing '('");
    std::string name = trim(std::string_view(s).substr(0, open));
    if (!is_dotted_identifier(name)) malformed(text, "prototype name is not a dotted identifier");

    // Locate the matching close paren, honoring nesting and quotes.
    std::size_t close = std::string::npos;
    {
        int depth = 0;
        char quote = 0;
        for (std::size_t i = open; i < s.size(); ++i) {
            char c = s[i];
            if (quote) {
                if (c == '\\' && i + 1 < s.size()) ++i;
                else if (c == quote) quote = 0;
            } else if (c == '\'' || c == '"') {
                quote = c;
            } else if (c == '(') {
                ++depth;
            } else if (c == ')') {
                if (--depth == 0) { close = i; break; }
            }
        }
    }
    if (close == std::string::npos) malformed(text, "unbalanced parentheses");
    if (!trim(std::string_view(s).substr(close + 1)).empty())
        malformed(text, "trailing text after prototype");

    std::string_view arglist(s.data() + open + 1, close - open - 1);

    Signature sig;
    sig.qualified_name = name;
    sig.entry_kind = entry_kind;

    int bracket_depth = 0;
    bool arg_seen = false;
    bool comma_pending = false;
    bool keyword_seen = false;
    bool optional_seen = false;
    std::unordered_set<std::string> names;

    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < arglist.size() && std::isspace(static_cast<unsigned char>(arglist[i]))) ++i;
    };
    while (true) {
        skip_ws();
        if (i >= arglist.size()) break;
        char c = arglist[i];
        if (c == '[') {
            ++bracket_depth;
            ++i;
            continue;
        }
        if (c == ']') {
            if (bracket_depth == 0) malformed(text, "unbalanced ']'");
            --bracket_depth;
            ++i;
            continue;
        }
        if (c == ',') {
            if (!arg_seen) malformed(text, "leading comma in argument list");
            if (comma_pending) malformed(text, "empty argument name");
            comma_pending = true;
            ++i;
            continue;
        }
        if (c == '*' || c == '/') {
            // *args / **kwargs / bare separators carry no emittable argument.
            std::size_t start = i;
            while (i < arglist.size() && arglist[i] == '*') ++i;
            if (c == '/') ++i;
            while (i < arglist.size() && is_word_char(arglist[i])) ++i;
            log_warn("dropping variadic/separator \"" + std::string(arglist.substr(start, i - start)) +
                     "\" from signature " + name);
            arg_seen = true;
            comma_pending = false;
            continue;
        }
        if (c == '.') {
            // "..." ellipsis placeholder
            std::size_t start = i;
            while (i < arglist.size() && arglist[i] == '.') ++i;
            if (i - start < 3) malformed(text, "unexpected '.' in argument list");
            log_warn("dropping ellipsis from signature " + name);
            arg_seen = true;
            comma_pending = false;
            continue;
        }
        if (!is_ident_start(c)) malformed(text, "invalid argument name start");

        std::size_t start = i;
        while (i < arglist.size() && is_word_char(arglist[i])) ++i;
        std::string arg_name(arglist.substr(start, i - start));
        if (arg_seen && !comma_pending) malformed(text, "missing comma between arguments");

        skip_ws();
        std::optional<std::string> default_text;
        if (i < arglist.size() && arglist[i] == '=') {
            ++i;
            std::size_t dstart = i;
            i = scan_default(arglist, i, text);
            default_text = trim(arglist.substr(dstart, i - dstart));
            if (default_text->empty()) malformed(text, "empty default value for " + arg_name);
        }

        ArgSpec arg;
        arg.name = arg_name;
        arg.position = static_cast<int>(sig.args.size());
        if (default_text) {
            arg.kind = ArgKind::keyword;
            arg.default_text = std::move(default_text);
            keyword_seen = true;
        } else if (bracket_depth > 0) {
            if (keyword_seen) malformed(text, "positional argument after keyword argument");
            arg.kind = ArgKind::optional_positional;
            optional_seen = true;
        } else {
            if (keyword_seen) malformed(text, "required argument after keyword argument");
            if (optional_seen) malformed(text, "required argument after optional argument");
            arg.kind = ArgKind::required;
        }
        if (!names.insert(arg.name).second) malformed(text, "duplicate argument name " + arg.name);
        sig.args.push_back(std::move(arg));
        arg_seen = true;
        comma_pending = false;
    }
    if (bracket_depth != 0) malformed(text, "unbalanced '['");
    if (comma_pending) malformed(text, "trailing comma in argument list");

    if (entry_kind == EntryKind::constructor) {
        std::string derived = last_component(sig.qualified_name);
        if (class_name && *class_name != derived)
            malformed(text, "class name " + *class_name + " does not match prototype " + derived);
        sig.class_name = derived;
    } else if (class_name) {
        sig.class_name = std::move(class_name);
    }
    return sig;
}

namespace {

struct Candidate {
    int optional_count = 0;
    std::vector<std::string> included;  // signature order
    std::string args_text;
};

bool candidate_less(const Candidate& a, const Candidate& b) {
    if (a.optional_count != b.optional_count) return a.optional_count < b.optional_count;
    return a.included < b.included;
}

Candidate make_candidate(const std::vector<std::string>& required,
                         const std::vector<std::string>& optionals, std::size_t prefix,
                         const std::vector<std::string>& keywords,
                         const std::vector<std::size_t>& kw_subset) {
    Candidate c;
    c.optional_count = static_cast<int>(prefix + kw_subset.size());
    std::string args;
    auto add = [&](const std::string& piece, const std::string& name) {
        if (!args.empty()) args += ", ";
        args += piece;
        c.included.push_back(name);
    };
    for (const auto& r : required) add(r, r);
    for (std::size_t i = 0; i < prefix; ++i) add(optionals[i], optionals[i]);
    for (std::size_t idx : kw_subset) add(keywords[idx] + "=" + keywords[idx], keywords[idx]);
    c.args_text = std::move(args);
    return c;
}

// Visits all size-`want` index subsets of [0, n) in ascending index order.
template <typename Fn>
void for_each_combination(std::size_t n, std::size_t want, Fn&& fn) {
    std::vector<std::size_t> idx(want);
    for (std::size_t i = 0; i < want; ++i) idx[i] = i;
    if (want > n) return;
    while (true) {
        fn(idx);
        // advance
        std::size_t i = want;
        while (i > 0) {
            --i;
            if (idx[i] != i + n - want) {
                ++idx[i];
                for (std::size_t j = i + 1; j < want; ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0) return;
        }
        if (want == 0) return;
    }
}

} // namespace

std::vector<UsageSnippet> enumerate_usages(const Signature& sig) {
    const std::vector<std::string> required = sig.names_of(ArgKind::required);
    const std::vector<std::string> optionals = sig.names_of(ArgKind::optional_positional);
    const std::vector<std::string> keywords = sig.names_of(ArgKind::keyword);
    const std::size_t p = optionals.size();
    const std::size_t q = keywords.size();

    // Generate level by level (total optional count ascending) so the cap can
    // cut without materializing all (p+1)*2^q permutations.
    std::vector<Candidate> cands;
    for (std::size_t level = 0; level <= p + q; ++level) {
        for (std::size_t prefix = 0; prefix <= std::min(level, p); ++prefix) {
            std::size_t kw = level - prefix;
            if (kw > q) continue;
            for_each_combination(q, kw, [&](const std::vector<std::size_t>& subset) {
                cands.push_back(make_candidate(required, optionals, prefix, keywords, subset));
            });
        }
        if (cands.size() >= kMaxUsagesPerSignature) break;
    }

    std::sort(cands.begin(), cands.end(), candidate_less);

    std::vector<UsageSnippet> out;
    std::set<std::string> seen;
    for (const auto& c : cands) {
        if (out.size() >= kMaxUsagesPerSignature) break;
        std::string code = sig.qualified_name + "(" + c.args_text + ")";
        if (!seen.insert(code).second) continue;
        UsageSnippet u;
        u.code = std::move(code);
        u.included_args = c.included;
        u.optional_count = c.optional_count;
        out.push_back(std::move(u));
    }
    return out;
}

std::string render_usage(const Signature& sig, const UsageSnippet& usage) {
    std::string args;
    for (const auto& name : usage.included_args) {
        if (!args.empty()) args += ", ";
        const ArgSpec* spec = sig.find_arg(name);
        if (spec && spec->kind == ArgKind::keyword)
            args += name + "=" + name;
        else
            args += name;
    }

    if (sig.entry_kind == EntryKind::function) return sig.qualified_name + "(" + args + ")";

    if (!sig.class_name || sig.class_name->empty())
        throw MissingClassName("signature " + sig.qualified_name + " needs a class name to render");

    std::string var(1, ascii_lower((*sig.class_name)[0]));
    for (const auto& name : usage.included_args)
        if (name == var) { var += "0"; break; }

    if (sig.entry_kind == EntryKind::constructor)
        return var + " = " + sig.qualified_name + "(" + args + ")";

    std::size_t dot = sig.qualified_name.rfind('.');
    std::string method = dot == std::string::npos ? sig.qualified_name : sig.qualified_name.substr(dot + 1);
    return var + "." + method + "(" + args + ")";
}

} // namespace nlcorpus::sigparse
