#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlcorpus/pair.hpp"
#include "nlcorpus/sigparse.hpp"

namespace nlcorpus::docharvest {

enum class DocKind { function, klass, method };

DocKind doc_kind_from_string(std::string_view s);
std::string_view to_string(DocKind k);

struct DocEntry {
    std::string module;
    DocKind kind = DocKind::function;
    std::optional<std::string> owner_class;  // method kind only
    std::string signature_text;
    std::string description;
};

// Splits prose into sentences: blank lines separate paragraphs, whitespace
// runs collapse to single spaces, and sentences end at . ! ? followed by
// whitespace outside parentheses.
std::vector<std::string> split_sentences(std::string_view description);

// Builds a concise intent for one usage: the first sentence, plus the first
// sentence mentioning each included argument (whole-word, case-sensitive,
// argument order, no repeats), plus a trailing "With arguments 'a' ..."
// sentence covering arguments the prose never mentions. Throws
// EmptyDescription when the description has no sentences.
std::string build_intent(std::string_view description, const sigparse::UsageSnippet& usage);

// Module-qualified signature for a doc entry (methods gain the owner class
// segment). Throws MalformedSignature like parse_signature.
sigparse::Signature parse_entry_signature(const DocEntry& entry);

struct HarvestStats {
    std::size_t entries_read = 0;
    std::size_t entries_skipped = 0;   // unparseable signatures
    std::size_t pairs_emitted = 0;     // before dedup
    std::size_t pairs_skipped = 0;     // empty descriptions
    std::size_t distinct_pairs = 0;
};

struct HarvestResult {
    std::vector<NLCodePair> pairs;  // deduplicated, first-occurrence order
    HarvestStats stats;
};

HarvestResult harvest(const std::vector<DocEntry>& entries);

struct DocDump {
    std::vector<DocEntry> entries;
    std::vector<std::size_t> malformed_lines;
};

// Reads a JSONL doc dump (fields module, kind, owner_class, signature_text,
// description). Malformed lines are skipped and reported.
DocDump read_doc_dump(const std::filesystem::path& path);

} // namespace nlcorpus::docharvest
