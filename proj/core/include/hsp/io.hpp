#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "hsp/inference.hpp"
#include "hsp/mollify.hpp"
#include "hsp/pathgen.hpp"
#include "hsp/spectral.hpp"

namespace hsp {

/// Full-precision decimal formatting used by every CSV/JSON writer.
std::string format_double(double value);

/// Two-column CSV with header `t,x`.
void write_path_csv(const PathSample& path, const std::filesystem::path& file);

/// Reads a `t,x` CSV; the mesh is inferred and checked for equidistance.
/// A sidecar written by write_path_metadata is picked up when present.
PathSample read_path_csv(const std::filesystem::path& file);

/// Structured key-value sidecar (<file>.meta.json): seed, generator
/// descriptor, mesh, length, time origin plus caller-supplied fields.
void write_path_metadata(const PathSample& path, const std::filesystem::path& csv_file,
                         const std::map<std::string, std::string>& extra = {});

/// Discretized kernel as CSV `l,t,v` (t is the scaled argument theta*delta*(l-L/2)).
void write_kernel_csv(const DiscreteKernel& kernel, const std::filesystem::path& file);

/// Periodogram as CSV `freq,ordinate` with physical frequencies.
void write_periodogram_csv(const Periodogram& pg, const std::filesystem::path& file);

/// Density estimate as CSV `z,rho_hat`.
void write_density_csv(const DensityEstimate& density, const std::filesystem::path& file);

/// EstimationReport as a flat JSON object.
void write_report_json(const EstimationReport& report, const std::filesystem::path& file);

}  // namespace hsp
