#pragma once

#include <stdexcept>
#include <string>

namespace mvembed {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// dataset / file ingestion
class MissingFileError : public Error { public: using Error::Error; };
class RowCountMismatchError : public Error { public: using Error::Error; };
class NonFiniteEntryError : public Error { public: using Error::Error; };
class EmptyViewError : public Error { public: using Error::Error; };
class CsvFormatError : public Error { public: using Error::Error; };
class BadShapeError : public Error { public: using Error::Error; };
class BadFractionError : public Error { public: using Error::Error; };

// optimizer
class ConfigError : public Error { public: using Error::Error; };
class EigenFailureError : public Error { public: using Error::Error; };

// evaluation
class DimensionMismatchError : public Error { public: using Error::Error; };
class LengthMismatchError : public Error { public: using Error::Error; };
class MissingLabelsError : public Error { public: using Error::Error; };

}  // namespace mvembed
