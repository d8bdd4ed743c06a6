__package__ = 'inertialab'
