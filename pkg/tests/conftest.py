import cxorder

# Library classes whose names start with "Test" are data types, not suites.
cxorder.TestSpec.__test__ = False
cxorder.TestResult.__test__ = False
