#pragma once

#include <stdexcept>
#include <string>

namespace gchtw {

// Exit-code-bearing error categories used by the CLI front end.
struct no_saddle_error : std::runtime_error {
    explicit no_saddle_error(const std::string& what) : std::runtime_error(what) {}
};

struct no_continuity_root_error : std::runtime_error {
    explicit no_continuity_root_error(const std::string& what) : std::runtime_error(what) {}
};

struct resonance_error : std::runtime_error {
    explicit resonance_error(const std::string& what) : std::runtime_error(what) {}
};

struct verification_error : std::runtime_error {
    explicit verification_error(const std::string& what) : std::runtime_error(what) {}
};

struct not_a_saddle_error : std::runtime_error {
    explicit not_a_saddle_error(const std::string& what) : std::runtime_error(what) {}
};

struct singular_degeneracy_error : std::runtime_error {
    explicit singular_degeneracy_error(const std::string& what) : std::runtime_error(what) {}
};

struct not_an_equilibrium_error : std::runtime_error {
    explicit not_an_equilibrium_error(const std::string& what) : std::runtime_error(what) {}
};

struct unsupported_equation_error : std::runtime_error {
    explicit unsupported_equation_error(const std::string& what) : std::runtime_error(what) {}
};

struct ill_conditioned_error : std::runtime_error {
    explicit ill_conditioned_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gchtw
