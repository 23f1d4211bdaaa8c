#include "logeff/error.hpp"

namespace logeff {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::MissingMandatoryField: return "MissingMandatoryField";
    case ErrorKind::BadTimestamp: return "BadTimestamp";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::CorpusEmpty: return "CorpusEmpty";
    case ErrorKind::TemplateParse: return "TemplateParse";
    case ErrorKind::DuplicateTarget: return "DuplicateTarget";
    case ErrorKind::UnknownTransform: return "UnknownTransform";
    case ErrorKind::TemplateMismatch: return "TemplateMismatch";
    case ErrorKind::SignatureParse: return "SignatureParse";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::BadRegex: return "BadRegex";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::PreservedExceedsTotal: return "PreservedExceedsTotal";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    }
    return "UnknownError";
}

}  // namespace logeff
