#pragma once

#include <stdexcept>
#include <string>

namespace weakflux {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Quadrature ran out of its subdivision budget before meeting the tolerance.
class NonConvergent : public Error { public: using Error::Error; };
// An integrand returned NaN or infinity.
class NonFinite : public Error { public: using Error::Error; };
class NoInteriorMinimum : public Error { public: using Error::Error; };
class NonPositiveCurvature : public Error { public: using Error::Error; };
// Weak value requested where the pre/post overlap vanishes.
class VanishingOverlap : public Error { public: using Error::Error; };
// Time density has no mass: pre- and post-selection never connect.
class ZeroNorm : public Error { public: using Error::Error; };
class UnknownOperator : public Error { public: using Error::Error; };
class DegeneratePostSpinor : public Error { public: using Error::Error; };
class NearOrthogonalPostSelection : public Error { public: using Error::Error; };
class ZeroField : public Error { public: using Error::Error; };
class SteepestDescentMismatch : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };
class ValidationError : public Error { public: using Error::Error; };

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(msg + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line(line),
          column(column) {}
    int line;
    int column;
};

}  // namespace weakflux
