#pragma once

#include <string>

#include "mdlab/codes.hpp"
#include "mdlab/experiments.hpp"
#include "mdlab/region.hpp"

namespace mdlab::io {

// coset codes <-> JSON (q, n, k, row-major generator, dither, seed)
std::string code_to_json(const codes::CosetCode& code);
codes::CosetCode code_from_json(const std::string& text);

// experiment configs; unknown keys are rejected so config mistakes surface
experiments::ExperimentConfig config_from_json(const std::string& text,
                                               const experiments::ExperimentConfig& defaults);
std::string config_to_json(const experiments::ExperimentConfig& cfg);

std::string report_to_json(const experiments::ExperimentReport& rep);
std::string report_to_csv(const experiments::ExperimentReport& rep);  // RFC 4180, one row per trial

// region specs and RD vectors
region::RegionSpec region_spec_from_json(const std::string& text);
region::RdVector rd_vector_from_json(const std::string& text);
std::string membership_to_json(const region::Membership& m, const region::BoundSystem& sys);
std::string projection_to_json(const region::ProjectedRegion& proj);

std::string figd_to_json(const experiments::FigdResult& res, double d0);
std::string figd_slice_csv(const experiments::FigdResult& res);

std::string sha256_hex(const std::string& bytes);

struct Manifest {
    std::string command;
    std::string config_path;
    std::string config_sha256;
    std::uint64_t master_seed = 0;
    std::string timestamp;
    std::vector<std::string> outputs;
};
std::string manifest_to_json(const Manifest& m);

}  // namespace mdlab::io
