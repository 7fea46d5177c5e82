# Unit config tests package
