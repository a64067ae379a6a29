//! Acceptance suite for the workspace. The checks live in the `acceptance`
//! test target, which prints one PASS/FAIL line per criterion.
