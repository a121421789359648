#pragma once

#include <stdexcept>
#include <string>

namespace ob {

// Root of every error raised by the library. The CLI maps ConfigError to
// exit code 2 and everything else to exit code 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define OB_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                        \
    public:                                                            \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

OB_DEFINE_ERROR(ConfigError);
OB_DEFINE_ERROR(DegenerateGeometry);
OB_DEFINE_ERROR(SnapFailure);
OB_DEFINE_ERROR(InvalidTheta);
OB_DEFINE_ERROR(LayerPlacement);
OB_DEFINE_ERROR(SingularSystem);
OB_DEFINE_ERROR(UnitarityBreach);
OB_DEFINE_ERROR(BranchAmbiguity);
OB_DEFINE_ERROR(FactorizationSingular);
OB_DEFINE_ERROR(NoConvergence);
OB_DEFINE_ERROR(NullRestriction);
OB_DEFINE_ERROR(IoError);

#undef OB_DEFINE_ERROR

} // namespace ob
