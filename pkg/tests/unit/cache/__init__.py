# Unit cache tests package
