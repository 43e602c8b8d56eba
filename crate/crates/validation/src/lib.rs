//! Holds the `acceptance` test target, which checks the reproduced numbers
//! end to end and prints one PASS/FAIL line per criterion. It lives in its own
//! package so that it runs after every other suite in the workspace.
