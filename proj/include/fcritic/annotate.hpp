#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

namespace fcritic {

struct AnnotateOptions {
    std::filesystem::path run_dir;
    /// Command used to open each image; the path is appended. Empty = none.
    std::string viewer_command;
    std::string annotator = "human";
};

struct AnnotateSummary {
    std::size_t total = 0;
    std::size_t already_labeled = 0;
    std::size_t labeled_now = 0;
    bool finished = false;
};

/// Human baseline labelling over a planned run directory.
///
/// Presents each unlabelled case's image path (and opens it with the viewer
/// command), accepts 1 (reasonable) or 2 (unreasonable), re-prompts on any
/// other input, and stops on "q" or end of input. Labels are persisted as
/// CaseRecords in <run_dir>/annotations/, so a later session resumes from
/// where this one stopped and `report` scores them like any backend.
AnnotateSummary annotate_human(const AnnotateOptions& options, std::istream& in, std::ostream& out);

}  // namespace fcritic
