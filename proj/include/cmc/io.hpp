#ifndef CMC_IO_HPP
#define CMC_IO_HPP

#include <string>
#include <vector>

#include "cmc/data.hpp"

namespace cmc {

/// Read a UTF-8 CSV with a header row into a Dataset. The response
/// column is removed from the predictor set; an empty predictor list
/// means "all other columns". Constant predictor columns are rejected.
Dataset ingest_csv(const std::string& path, const std::string& response,
                   const std::vector<std::string>& predictors, Family family);

/// Same, but from already-loaded text (used by tests).
Dataset ingest_csv_text(const std::string& text, const std::string& path,
                        const std::string& response,
                        const std::vector<std::string>& predictors,
                        Family family);

}  // namespace cmc

#endif
