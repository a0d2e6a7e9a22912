#ifndef OSCPHASE_TOOLS_COMMANDS_HPP
#define OSCPHASE_TOOLS_COMMANDS_HPP

#include <filesystem>
#include <string>

#include "config.hpp"

namespace oscphase::cli {

struct CommonFlags {
    std::filesystem::path config;
    std::filesystem::path out_dir = ".";
    double tol = 0.0;          // 0 = take from config
    double horizon = 0.0;      // periods; 0 = take from config
    double seed_shift = 0.0;   // lock guess shifted along the orbit by tau
};

void cmd_lock(const CommonFlags& flags);
void cmd_floquet(const CommonFlags& flags);
void cmd_extract(const CommonFlags& flags);
void cmd_simulate(const CommonFlags& flags, const std::string& which); // full|reduced
void cmd_compare(const CommonFlags& flags);
void cmd_demo_blowup(const CommonFlags& flags);

} // namespace oscphase::cli

#endif
