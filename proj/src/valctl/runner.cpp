namespace wassval {}
