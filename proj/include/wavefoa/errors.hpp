#pragma once

#include <stdexcept>
#include <string>

namespace wavefoa {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// -- geometry / field errors --------------------------------------------

/// A sample or focus position lies outside the retina rectangle.
class OutOfDomainError : public Error { public: using Error::Error; };

/// Two fields that must share a grid do not.
class GridMismatchError : public Error { public: using Error::Error; };

/// Frame timestamps are not strictly increasing.
class NonMonotonicTimeError : public Error { public: using Error::Error; };

// -- solver errors ------------------------------------------------------

/// Explicit scheme requested with a time step above the stability bound.
class UnstableSchemeError : public Error { public: using Error::Error; };

/// Iterative solver exceeded its iteration cap before reaching tolerance.
class SolverDivergedError : public Error { public: using Error::Error; };

/// PDE parameters are degenerate (m = d = 0).
class DegenerateParamsError : public Error { public: using Error::Error; };

/// Closed-form wave potential queried outside the light cone (r > ct).
class OutsideLightConeError : public Error { public: using Error::Error; };

/// Evaluation point coincides with a singular source location.
class SingularEvaluationError : public Error { public: using Error::Error; };

/// Heat kernel queried at t <= 0.
class NonpositiveTimeError : public Error { public: using Error::Error; };

// -- metric / pipeline errors -------------------------------------------

/// An operation that needs at least one element received none.
class EmptyInputError : public Error { public: using Error::Error; };

/// Saliency map has zero standard deviation, NSS undefined.
class DegenerateMapError : public Error { public: using Error::Error; };

/// Scanpath has fewer fixations than the embedding length.
class PathTooShortError : public Error { public: using Error::Error; };

// -- I/O errors ---------------------------------------------------------

/// Generic filesystem failure (open/read/write).
class IoError : public Error { public: using Error::Error; };

/// PGM header is not a P2/P5 header this reader understands.
class MalformedHeaderError : public Error { public: using Error::Error; };

/// PGM pixel payload ends before width*height samples.
class TruncatedDataError : public Error { public: using Error::Error; };

/// PGM maxval other than 255 or 65535.
class UnsupportedMaxvalError : public Error { public: using Error::Error; };

/// Fixation CSV is missing a required column.
class MissingColumnError : public Error { public: using Error::Error; };

/// Fixation CSV row failed to parse; message carries the row index.
class UnparsableRowError : public Error { public: using Error::Error; };

/// Run configuration contains unknown keys or invalid values.
class ConfigError : public Error { public: using Error::Error; };

} // namespace wavefoa
