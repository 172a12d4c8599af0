#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlcorpus/errors.hpp"

namespace nlcorpus::sigparse {

enum class ArgKind { required, optional_positional, keyword };

struct ArgSpec {
    std::string name;
    ArgKind kind = ArgKind::required;
    std::optional<std::string> default_text;  // keyword kind only
    int position = 0;
};

enum class EntryKind { function, constructor, method };

struct Signature {
    std::string qualified_name;
    EntryKind entry_kind = EntryKind::function;
    std::vector<ArgSpec> args;
    std::optional<std::string> class_name;  // constructor/method only

    std::vector<std::string> names_of(ArgKind kind) const;
    const ArgSpec* find_arg(std::string_view name) const;
};

struct UsageSnippet {
    std::string code;                        // call expression, e.g. "collections.deque(iterable)"
    std::vector<std::string> included_args;  // signature order; always contains all required args
    int optional_count = 0;                  // non-required args included
};

// Emitted usages are capped to the permutations with the fewest optional
// arguments; ties break on the lexicographic included-args tuple.
inline constexpr std::size_t kMaxUsagesPerSignature = 10;

// Parses one prototype of the form name(args...). Unbracketed names are
// required, names inside (possibly nested) square brackets are optional
// positionals in nesting order, and name=literal is a keyword argument.
// Variadic markers (*args, **kwargs) and bare * / separators are dropped
// with a warning. Throws MalformedSignature on unbalanced brackets or
// parentheses, empty or invalid argument names, duplicates, or argument
// kinds out of signature order.
Signature parse_signature(std::string_view text, EntryKind entry_kind,
                          std::optional<std::string> class_name = std::nullopt);

// All emulated usages of a signature: the p+1 positional prefix truncations
// crossed with every keyword subset, capped to kMaxUsagesPerSignature.
// Output is sorted by ascending optional_count, then by the lexicographic
// included-args tuple.
std::vector<UsageSnippet> enumerate_usages(const Signature& sig);

// Realizes a usage as code. Functions render as plain calls; constructors
// as "v = qualified(args)" and methods as "v.method(args)", where v is the
// lower-cased first character of the class name (suffixed with "0" when it
// collides with an included argument). Throws MissingClassName when the
// entry kind needs a class name and none is set.
std::string render_usage(const Signature& sig, const UsageSnippet& usage);

} // namespace nlcorpus::sigparse
