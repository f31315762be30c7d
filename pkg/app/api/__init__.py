"""Report and suite-configuration schemas"""
