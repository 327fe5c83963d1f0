// errors.hpp - exception hierarchy with machine-readable codes.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaussflow {

enum class ErrorCode {
    domain,        // point or time outside the declared domain
    degeneracy,    // singular metric or induced metric
    chart,         // outside bundle-chart validity
    rank,          // frame lost rank
    usage,         // inputs inconsistent with each other
    stencil,       // finite-difference stencil unavailable
    config,        // scenario/schema violation
    precondition,  // check precondition not satisfied
    extinction,    // flow reached a singularity
    io,            // file read/write failure
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define GAUSSFLOW_DEFINE_ERROR(Name, Code)                                   \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(ErrorCode::Code, what) {} \
    };

GAUSSFLOW_DEFINE_ERROR(DomainError, domain)
GAUSSFLOW_DEFINE_ERROR(DegeneracyError, degeneracy)
GAUSSFLOW_DEFINE_ERROR(ChartError, chart)
GAUSSFLOW_DEFINE_ERROR(RankError, rank)
GAUSSFLOW_DEFINE_ERROR(UsageError, usage)
GAUSSFLOW_DEFINE_ERROR(StencilError, stencil)
GAUSSFLOW_DEFINE_ERROR(ConfigError, config)
GAUSSFLOW_DEFINE_ERROR(PreconditionError, precondition)
GAUSSFLOW_DEFINE_ERROR(IoError, io)

#undef GAUSSFLOW_DEFINE_ERROR

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::domain: return "E_DOMAIN";
        case ErrorCode::degeneracy: return "E_DEGENERACY";
        case ErrorCode::chart: return "E_CHART";
        case ErrorCode::rank: return "E_RANK";
        case ErrorCode::usage: return "E_USAGE";
        case ErrorCode::stencil: return "E_STENCIL";
        case ErrorCode::config: return "E_CONFIG";
        case ErrorCode::precondition: return "E_PRECONDITION";
        case ErrorCode::extinction: return "E_EXTINCTION";
        case ErrorCode::io: return "E_IO";
    }
    return "E_UNKNOWN";
}

}  // namespace gaussflow
