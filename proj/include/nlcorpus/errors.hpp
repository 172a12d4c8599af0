#pragma once

#include <stdexcept>
#include <string>

namespace nlcorpus {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// sigparse
struct MalformedSignature : Error { using Error::Error; };
struct MissingClassName : Error { using Error::Error; };

// docharvest
struct EmptyDescription : Error { using Error::Error; };

// retrieval
struct DuplicateDocId : Error { using Error::Error; };
struct EmptyCollection : Error { using Error::Error; };

// resample
struct AllZeroFrequencies : Error { using Error::Error; };

// corpus
struct IoFailure : Error { using Error::Error; };
struct MalformedRecord : Error { using Error::Error; };
struct MissingConfidence : Error { using Error::Error; };
struct StrategyMismatch : Error { using Error::Error; };

// evalmetrics
struct LengthMismatch : Error { using Error::Error; };
struct EmptyCorpus : Error { using Error::Error; };
struct InsufficientInstances : Error { using Error::Error; };

// cli
struct ConfigError : Error { using Error::Error; };

} // namespace nlcorpus
